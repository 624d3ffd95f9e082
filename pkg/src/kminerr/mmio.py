"""Matrix Market and plain-text vector I/O for dense real matrices."""
import numpy as np


class MatrixMarketError(ValueError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def _fmt(v):
    # repr of a Python float is the shortest string that round-trips
    return repr(float(v))


def save_matrix_market(path, A, fmt="array"):
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    m, n = A.shape
    with open(path, "w") as f:
        if fmt == "array":
            f.write("%%MatrixMarket matrix array real general\n")
            f.write(f"{m} {n}\n")
            for v in A.ravel(order="F"):
                f.write(_fmt(v) + "\n")
        elif fmt == "coordinate":
            rows, cols = np.nonzero(A)
            order = np.lexsort((rows, cols))
            f.write("%%MatrixMarket matrix coordinate real general\n")
            f.write(f"{m} {n} {rows.size}\n")
            for i, j in zip(rows[order], cols[order]):
                f.write(f"{i + 1} {j + 1} {_fmt(A[i, j])}\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")


def _data_lines(path):
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            s = line.strip()
            if s and not s.startswith("%"):
                yield lineno, s


def load_matrix_market(path):
    """Read an ``array`` or ``coordinate`` real general/symmetric file into a dense array."""
    path = str(path)
    with open(path) as f:
        header = f.readline()
    tokens = header.lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
        raise MatrixMarketError(path, 1, f"bad header {header.strip()!r}")
    layout, field, symmetry = tokens[2:]
    if layout not in ("array", "coordinate"):
        raise MatrixMarketError(path, 1, f"unsupported layout {layout!r}")
    if field not in ("real", "double", "integer"):
        raise MatrixMarketError(path, 1, f"unsupported field {field!r}")
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(path, 1, f"unsupported symmetry {symmetry!r}")
    lines = _data_lines(path)
    try:
        lineno, size = next(lines)
    except StopIteration:
        raise MatrixMarketError(path, 1, "missing size line") from None
    try:
        dims = [int(t) for t in size.split()]
    except ValueError:
        raise MatrixMarketError(path, lineno, f"bad size line {size!r}") from None
    want = 2 if layout == "array" else 3
    if len(dims) != want or min(dims[:2]) < 1 or min(dims) < 0:
        raise MatrixMarketError(path, lineno, f"bad size line {size!r}")
    m, n = dims[:2]
    A = np.zeros((m, n))
    if layout == "array":
        if symmetry == "symmetric":
            slots = [(i, j) for j in range(n) for i in range(j, m)]
        else:
            slots = [(i, j) for j in range(n) for i in range(m)]
        count = 0
        for lineno, s in lines:
            if count >= len(slots):
                raise MatrixMarketError(path, lineno, "more entries than the declared size")
            try:
                v = float(s.split()[0])
            except ValueError:
                raise MatrixMarketError(path, lineno, f"bad value {s!r}") from None
            i, j = slots[count]
            A[i, j] = v
            if symmetry == "symmetric":
                A[j, i] = v
            count += 1
        if count != len(slots):
            raise MatrixMarketError(path, lineno, f"expected {len(slots)} entries, got {count}")
    else:
        nnz = dims[2]
        count = 0
        for lineno, s in lines:
            parts = s.split()
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except (ValueError, IndexError):
                raise MatrixMarketError(path, lineno, f"bad entry {s!r}") from None
            if not (1 <= i <= m and 1 <= j <= n):
                raise MatrixMarketError(path, lineno, f"index ({i}, {j}) outside {m}x{n}")
            A[i - 1, j - 1] = v
            if symmetry == "symmetric":
                A[j - 1, i - 1] = v
            count += 1
        if count != nnz:
            raise MatrixMarketError(path, lineno, f"expected {nnz} entries, got {count}")
    if not np.all(np.isfinite(A)):
        raise MatrixMarketError(path, 0, "non-finite entries")
    return A


def save_vector(path, v):
    with open(path, "w") as f:
        for x in np.asarray(v, dtype=np.float64).ravel():
            f.write(_fmt(x) + "\n")


def load_vector(path, expected_len=None):
    path = str(path)
    vals = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            s = line.strip()
            if not s or s.startswith("%") or s.startswith("#"):
                continue
            try:
                vals.append(float(s))
            except ValueError:
                raise MatrixMarketError(path, lineno, f"bad value {s!r}") from None
    v = np.array(vals, dtype=np.float64)
    if expected_len is not None and v.shape[0] != expected_len:
        raise MatrixMarketError(path, 0, f"vector has length {v.shape[0]} but the matrix has "
                                         f"{expected_len} rows")
    return v
