import csv

import pytest

from permvc.report import COMPRESSION_HEADER, EXTREMAL_HEADER, write_report


def read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_report_tables_and_figures(tmp_path):
    out = write_report(str(tmp_path), seeds=range(3))
    assert set(out) == {"extremal", "alpha", "compression"}
    for part in out.values():
        with open(part["png"], "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"

    rows = read(out["extremal"]["csv"])
    assert rows[0] == EXTREMAL_HEADER
    got = {(int(r[0]), int(r[1])): (int(r[2]), int(r[3])) for r in rows[1:]}
    # frozen oracle values
    assert got[2, 5] == (16, 13) and got[3, 5] == (22, 18) and got[3, 3] == (9, 9)
    assert all(r[5] == "True" for r in rows[1:])

    alpha = {(int(r[0]), int(r[1])): int(r[3]) for r in read(out["alpha"]["csv"])[1:]}
    assert alpha[1, 4] == 8 and alpha[2, 4] == 4 and alpha[4, 16] == 3

    comp = read(out["compression"]["csv"])
    assert comp[0] == COMPRESSION_HEADER and len(comp) == 4


def test_report_rejects_unknown_part(tmp_path):
    with pytest.raises(ValueError):
        write_report(str(tmp_path), parts=["nope"])
