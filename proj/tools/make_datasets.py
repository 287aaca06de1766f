#!/usr/bin/env python3
"""Regenerate the bundled datasets under data/.

tic-tac-toe: every legal end-game board of tic-tac-toe with x moving first,
labelled positive when x has three in a row (the UCI Tic-Tac-Toe Endgame set).

breast-cancer: the Wisconsin Diagnostic Breast Cancer data as shipped with
scikit-learn; label 1 = benign, 0 = malignant.
"""
import csv
import pathlib

LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8),
         (0, 4, 8), (2, 4, 6)]
CELLS = ["top-left", "top-middle", "top-right", "middle-left", "middle-middle",
         "middle-right", "bottom-left", "bottom-middle", "bottom-right"]


def wins(board, p):
    return any(all(board[i] == p for i in line) for line in LINES)


def endgames():
    seen = {}

    def play(board, player):
        key = "".join(board)
        if key in seen:
            return
        if wins(board, "x") or wins(board, "o") or "b" not in board:
            seen[key] = wins(board, "x")
            return
        seen[key] = None
        for i in range(9):
            if board[i] == "b":
                board[i] = player
                play(board, "o" if player == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    return sorted((k, v) for k, v in seen.items() if v is not None)


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data"
    out.mkdir(exist_ok=True)
    with open(out / "tic-tac-toe.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CELLS + ["class"])
        for key, xwin in endgames():
            w.writerow(list(key) + ["positive" if xwin else "negative"])

    from sklearn.datasets import load_breast_cancer
    bc = load_breast_cancer()
    with open(out / "breast-cancer.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([n.replace(" ", "_") for n in bc.feature_names] + ["benign"])
        for row, label in zip(bc.data, bc.target):
            w.writerow([repr(float(v)) for v in row] + [int(label)])


if __name__ == "__main__":
    main()
