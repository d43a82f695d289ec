use super::{Action, GameState, PlayerRole};
use crate::seed::mix64;

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

/// Tic-tac-toe. X is MAX and moves first; cells are numbered row-major 0..9.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TicTacToe {
    /// 0 = empty, 1 = X, 2 = O.
    cells: [u8; 9],
}

impl TicTacToe {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a 9-character board such as `"XO.X....."` (`.`, `-` or `_`
    /// for empty). The side to move is inferred from the piece counts.
    pub fn from_board(board: &str) -> Option<Self> {
        let chars: Vec<char> = board.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() != 9 {
            return None;
        }
        let mut cells = [0u8; 9];
        for (cell, c) in cells.iter_mut().zip(chars) {
            *cell = match c {
                'X' | 'x' => 1,
                'O' | 'o' => 2,
                '.' | '-' | '_' => 0,
                _ => return None,
            };
        }
        let xs = cells.iter().filter(|&&c| c == 1).count();
        let os = cells.iter().filter(|&&c| c == 2).count();
        if xs != os && xs != os + 1 {
            return None;
        }
        Some(Self { cells })
    }

    pub fn cells(&self) -> [u8; 9] {
        self.cells
    }

    pub fn board_string(&self) -> String {
        self.cells
            .iter()
            .map(|c| match c {
                1 => 'X',
                2 => 'O',
                _ => '.',
            })
            .collect()
    }

    fn winner(&self) -> Option<u8> {
        LINES.iter().find_map(|l| {
            let a = self.cells[l[0]];
            (a != 0 && a == self.cells[l[1]] && a == self.cells[l[2]]).then_some(a)
        })
    }

    fn placed(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }
}

impl GameState for TicTacToe {
    fn to_move(&self) -> PlayerRole {
        if self.placed() % 2 == 0 {
            PlayerRole::Max
        } else {
            PlayerRole::Min
        }
    }

    fn actions(&self) -> Vec<Action> {
        if self.is_terminal() {
            return Vec::new();
        }
        (0..9).filter(|&i| self.cells[i] == 0).collect()
    }

    fn apply(&self, action: Action) -> Self {
        debug_assert_eq!(self.cells[action], 0, "cell {action} is occupied");
        let mut next = *self;
        next.cells[action] = match self.to_move() {
            PlayerRole::Max => 1,
            PlayerRole::Min => 2,
        };
        next
    }

    fn terminal_return(&self) -> Option<f64> {
        match self.winner() {
            Some(1) => Some(1.0),
            Some(_) => Some(0.0),
            None if self.placed() == 9 => Some(0.5),
            None => None,
        }
    }

    fn state_key(&self) -> u64 {
        let code = self.cells.iter().fold(0u64, |acc, &c| acc * 3 + c as u64);
        mix64(code ^ 0x7474_7400)
    }
}
