//! Bundled datasets, emitted in the same text formats the loaders read.
//!
//! The tic-tac-toe endgame table is reproduced exactly by enumerating every
//! legal game with `x` moving first. The wifi generator is a seeded
//! surrogate with the localization file layout (seven RSSI readings in dBm
//! and a room label, 500 rows per room); use a real measurement file when
//! one is available.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StudentT};

pub const WIFI_SURROGATE_PER_ROOM: usize = 500;

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

fn wins(board: &[u8; 9], player: u8) -> bool {
    LINES.iter().any(|l| l.iter().all(|&c| board[c] == player))
}

fn play(board: &mut [u8; 9], mover: u8, out: &mut BTreeSet<[u8; 9]>) {
    for cell in 0..9 {
        if board[cell] != b'b' {
            continue;
        }
        board[cell] = mover;
        if wins(board, mover) || board.iter().all(|&c| c != b'b') {
            out.insert(*board);
        } else {
            play(board, if mover == b'x' { b'o' } else { b'x' }, out);
        }
        board[cell] = b'b';
    }
}

/// All 958 legal end-of-game boards, `positive` when `x` completed a line.
/// Positive rows come first; within a class rows are in lexicographic order.
pub fn tictactoe_endgame_text() -> String {
    let mut boards = BTreeSet::new();
    play(&mut [b'b'; 9], b'x', &mut boards);
    let (pos, neg): (Vec<_>, Vec<_>) = boards.into_iter().partition(|b| wins(b, b'x'));
    let mut text = String::new();
    for (rows, label) in [(pos, "positive"), (neg, "negative")] {
        for board in rows {
            for &c in &board {
                text.push(c as char);
                text.push(',');
            }
            text.push_str(label);
            text.push('\n');
        }
    }
    text
}

// Per-room mean RSSI (dBm) for the seven access points.
const ROOM_MEANS: [[f64; 7]; 4] = [
    [-63.0, -57.0, -61.0, -65.0, -70.0, -82.0, -83.0],
    [-41.0, -55.0, -53.0, -42.0, -63.0, -84.0, -85.0],
    [-50.0, -56.0, -51.0, -51.0, -62.0, -81.0, -84.0],
    [-61.0, -56.0, -58.0, -63.0, -50.0, -86.0, -86.0],
];
const ROOM_SPREAD: [f64; 7] = [2.5, 2.5, 2.5, 2.5, 3.0, 2.5, 2.5];

/// Seeded wifi-localization surrogate: tab-separated, rooms 1–4 in order.
///
/// Each reading is the room mean plus a per-sample device offset shared by
/// all access points and a heavy-tailed per-access-point fluctuation,
/// rounded to whole dBm.
pub fn wifi_surrogate_text(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = Normal::new(0.0, 2.0).expect("valid normal");
    let fluctuation = StudentT::new(5.0).expect("valid student-t");
    let mut text = String::new();
    for (room, means) in ROOM_MEANS.iter().enumerate() {
        for _ in 0..WIFI_SURROGATE_PER_ROOM {
            let device: f64 = rng.sample(offset);
            for (mean, spread) in means.iter().zip(ROOM_SPREAD) {
                let t: f64 = rng.sample(fluctuation);
                let rssi = (mean + device + spread * t).round().clamp(-100.0, -10.0);
                write!(text, "{}\t", rssi as i64).expect("write to string");
            }
            writeln!(text, "{}", room + 1).expect("write to string");
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endgame_table_has_uci_counts() {
        let text = tictactoe_endgame_text();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 958);
        assert_eq!(rows.iter().filter(|r| r.ends_with("positive")).count(), 626);
    }

    #[test]
    fn surrogate_is_seeded() {
        assert_eq!(wifi_surrogate_text(1), wifi_surrogate_text(1));
        assert_ne!(wifi_surrogate_text(1), wifi_surrogate_text(2));
        assert_eq!(wifi_surrogate_text(1).lines().count(), 2000);
    }
}
