import pytest

from corrsets.data import encode
from corrsets.datasets import tic_tac_toe_table, write_tic_tac_toe_csv


@pytest.fixture(scope="session")
def ttt_table():
    return tic_tac_toe_table()


@pytest.fixture(scope="session")
def ttt(ttt_table):
    return encode(ttt_table, discretize_numeric=False)


@pytest.fixture(scope="session")
def ttt_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "tictactoe.csv"
    write_tic_tac_toe_csv(path)
    return path
