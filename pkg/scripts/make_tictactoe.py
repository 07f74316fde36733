#!/usr/bin/env python3
"""Write the tic-tac-toe endgame benchmark CSV (958 rows, 10 columns)."""

import argparse

from corrsets.datasets import write_tic_tac_toe_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("path", nargs="?", default="tictactoe.csv")
    args = parser.parse_args()
    write_tic_tac_toe_csv(args.path)
    print(f"wrote {args.path}")


if __name__ == "__main__":
    main()
