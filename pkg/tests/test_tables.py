import numpy as np
import pytest

from lgfkit.free3d import IEvaluator, build_table
from lgfkit.tables import LgfTable, TableFormatError


@pytest.fixture(scope="module")
def table():
    return build_table(IEvaluator("lgf2"), 6)


def test_lookup_symmetry(table):
    assert table.lookup((-2, 1, 0)) == table.lookup((0, 1, 2))
    with pytest.raises(IndexError):
        table.lookup((7, 0, 0))
    with pytest.raises(ValueError):
        table.lookup((1, 0))


def test_dense_is_fully_symmetric(table):
    d = table.dense()
    assert d.shape == (7, 7, 7)
    for perm in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        assert np.array_equal(d, d.transpose(perm))


def test_binary_roundtrip(table, tmp_path):
    table.timestamp = 0
    path = tmp_path / "t.lgft"
    table.write(path)
    back = LgfTable.read(path)
    assert back.stencil == "lgf2" and back.extent == 6 and back.dim == 3
    assert np.array_equal(back.values, table.values)
    assert back.t_min == table.t_min and back.timestamp > 0


def test_header_layout(table):
    raw = table.to_bytes()
    assert raw[:4] == b"LGFT" and raw[4:6] == b"\x01\x00"
    assert raw[6:14] == b"lgf2\0\0\0\0"
    assert len(raw) == 4 + 2 + 8 + 1 + 4 + 4 + 4 * 8 + 8 + 8 * table.values.size + 4


def test_timestamp_outside_crc(table):
    a = LgfTable.from_bytes(table.to_bytes())
    a.timestamp = 123
    b = LgfTable.from_bytes(table.to_bytes())
    b.timestamp = 456
    ra, rb = a.to_bytes(), b.to_bytes()
    assert ra[-4:] == rb[-4:] and ra != rb


def test_corruption_detected(table):
    raw = bytearray(table.to_bytes())
    raw[70] ^= 0xFF  # payload starts after the 63-byte header
    with pytest.raises(TableFormatError, match="CRC"):
        LgfTable.from_bytes(bytes(raw))
    with pytest.raises(TableFormatError, match="magic"):
        LgfTable.from_bytes(b"XXXX" + bytes(table.to_bytes()[4:]))
    with pytest.raises(TableFormatError):
        LgfTable.from_bytes(table.to_bytes()[:-12])


def test_csv(table, tmp_path):
    path = tmp_path / "t.csv"
    table.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n1,n2,n3,value"
    assert len(lines) == table.values.size + 1
    n1, n2, n3, v = lines[1].split(",")
    assert float(v) == table.lookup((0, 0, 0))
