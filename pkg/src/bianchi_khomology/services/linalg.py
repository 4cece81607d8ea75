"""Exact integer linear algebra: Smith normal form, cokernels and chain homology."""

from loguru import logger

from ..core.exceptions import BianchiKError
from ..models.algebra import FgAbelianGroup, IntMatrix, SnfResult


class CompositionNonzero(BianchiKError):
    """Raised when a pair of differentials does not compose to zero."""

    pass


class _SmithReduction:
    """In-place Smith reduction of a nested-list integer matrix.

    Tracks U (row operations), V (column operations) and V⁻¹ so that
    U·A·V = D at every step. Pivots are chosen by minimal absolute value
    in the remaining block, then refined by gcd reduction along the pivot
    row and column.
    """

    def __init__(self, rows: list[list[int]], n_rows: int, n_cols: int):
        self.a = rows
        self.m = n_rows
        self.n = n_cols
        self.u = [[int(i == j) for j in range(n_rows)] for i in range(n_rows)]
        self.v = [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]
        self.v_inv = [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]

    # elementary operations

    def _swap_rows(self, i: int, k: int) -> None:
        if i != k:
            self.a[i], self.a[k] = self.a[k], self.a[i]
            self.u[i], self.u[k] = self.u[k], self.u[i]

    def _swap_cols(self, j: int, k: int) -> None:
        if j == k:
            return
        for row in self.a:
            row[j], row[k] = row[k], row[j]
        for row in self.v:
            row[j], row[k] = row[k], row[j]
        self.v_inv[j], self.v_inv[k] = self.v_inv[k], self.v_inv[j]

    def _add_row(self, target: int, source: int, q: int) -> None:
        """row_target += q · row_source."""
        a_t, a_s = self.a[target], self.a[source]
        for c in range(self.n):
            a_t[c] += q * a_s[c]
        u_t, u_s = self.u[target], self.u[source]
        for c in range(self.m):
            u_t[c] += q * u_s[c]

    def _add_col(self, target: int, source: int, q: int) -> None:
        """col_target += q · col_source."""
        for row in self.a:
            row[target] += q * row[source]
        for row in self.v:
            row[target] += q * row[source]
        # V⁻¹ picks up the inverse operation: row_source -= q · row_target
        inv_source, inv_target = self.v_inv[source], self.v_inv[target]
        for c in range(self.n):
            inv_source[c] -= q * inv_target[c]

    def _negate_row(self, i: int) -> None:
        self.a[i] = [-x for x in self.a[i]]
        self.u[i] = [-x for x in self.u[i]]

    # reduction

    def _min_pivot(self, t: int) -> tuple[int, int] | None:
        best: tuple[int, int] | None = None
        best_abs = 0
        for i in range(t, self.m):
            row = self.a[i]
            for j in range(t, self.n):
                x = row[j]
                if x and (best is None or abs(x) < best_abs):
                    best, best_abs = (i, j), abs(x)
                    if best_abs == 1:
                        return best
        return best

    def _min_on_cross(self, t: int) -> tuple[int, int]:
        best, best_abs = (t, t), abs(self.a[t][t])
        for i in range(t + 1, self.m):
            x = self.a[i][t]
            if x and (best_abs == 0 or abs(x) < best_abs):
                best, best_abs = (i, t), abs(x)
        for j in range(t + 1, self.n):
            x = self.a[t][j]
            if x and (best_abs == 0 or abs(x) < best_abs):
                best, best_abs = (t, j), abs(x)
        return best

    def _clear_cross(self, t: int) -> None:
        """Zero row t and column t outside the pivot, keeping a minimal pivot."""
        while True:
            i, j = self._min_on_cross(t)
            self._swap_rows(t, i)
            self._swap_cols(t, j)
            p = self.a[t][t]
            dirty = False
            for i in range(t + 1, self.m):
                x = self.a[i][t]
                if x:
                    self._add_row(i, t, -(x // p))
                    dirty = dirty or self.a[i][t] != 0
            for j in range(t + 1, self.n):
                x = self.a[t][j]
                if x:
                    self._add_col(j, t, -(x // p))
                    dirty = dirty or self.a[t][j] != 0
            if not dirty:
                return

    def _first_non_multiple(self, t: int) -> int | None:
        p = self.a[t][t]
        for i in range(t + 1, self.m):
            row = self.a[i]
            for j in range(t + 1, self.n):
                if row[j] % p:
                    return i
        return None

    def run(self) -> None:
        for t in range(min(self.m, self.n)):
            pivot = self._min_pivot(t)
            if pivot is None:
                break
            self._swap_rows(t, pivot[0])
            self._swap_cols(t, pivot[1])
            while True:
                self._clear_cross(t)
                offender = self._first_non_multiple(t)
                if offender is None:
                    break
                # pull the offending row up so the gcd reaches the pivot
                self._add_row(t, offender, 1)
            if self.a[t][t] < 0:
                self._negate_row(t)


def _reduce(m: IntMatrix) -> _SmithReduction:
    reduction = _SmithReduction(m.to_rows(), m.rows, m.cols)
    reduction.run()
    return reduction


def snf(m: IntMatrix) -> SnfResult:
    """Smith normal form with unimodular transforms.

    Args:
        m: Any integer matrix, including empty shapes

    Returns:
        SnfResult with U·m·V = D and d₁ | d₂ | … on the diagonal

    Example:
        >>> snf(IntMatrix.from_rows([[4, 0], [0, 6]])).divisors
        [2, 12]
    """
    reduction = _reduce(m)
    result = SnfResult(
        U=IntMatrix.from_rows(reduction.u, cols=m.rows),
        D=IntMatrix.from_rows(reduction.a, cols=m.cols),
        V=IntMatrix.from_rows(reduction.v, cols=m.cols),
    )
    logger.debug("Smith normal form computed", rows=m.rows, cols=m.cols, rank=result.rank)
    return result


def elementary_divisors(m: IntMatrix) -> list[int]:
    """Nonzero Smith diagonal of m in divisibility order."""
    return snf(m).divisors


def rank(m: IntMatrix) -> int:
    return len(elementary_divisors(m))


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Matrix whose columns form a Z-basis of ker(m).

    The basis is the trailing columns of V, beyond the rank.
    """
    reduction = _reduce(m)
    r = sum(1 for t in range(min(m.rows, m.cols)) if reduction.a[t][t] != 0)
    basis = [row[r:] for row in reduction.v]
    return IntMatrix.from_rows(basis, cols=m.cols - r)


def cokernel(m: IntMatrix) -> FgAbelianGroup:
    """The group Z^rows / im(m).

    Example:
        >>> cokernel(IntMatrix.from_rows([[0, 0], [0, 3]])).render()
        'Z + Z/3'
    """
    divisors = elementary_divisors(m)
    return FgAbelianGroup.from_cyclic_orders(*divisors, *([0] * (m.rows - len(divisors))))


def homology(d_out: IntMatrix, d_in: IntMatrix) -> FgAbelianGroup:
    """ker(d_out) / im(d_in) for a pair of composable differentials.

    The columns of d_in are rewritten in the kernel basis of d_out taken from
    its Smith decomposition, and the cokernel of that coordinate matrix is returned.

    Args:
        d_out: Differential leaving the degree (its columns index the degree)
        d_in: Differential arriving in the degree (its rows index the degree)

    Raises:
        ValueError: If the shapes do not compose
        CompositionNonzero: If d_out · d_in is not zero

    Example:
        >>> two = IntMatrix.from_rows([[2]])
        >>> zero = IntMatrix.from_rows([[0]])
        >>> homology(zero, two).render()
        'Z/2'
    """
    if d_out.cols != d_in.rows:
        raise ValueError(
            f"differentials do not compose: {d_out.rows}x{d_out.cols} after {d_in.rows}x{d_in.cols}"
        )
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero(
            f"d_out·d_in is not zero for shapes {d_out.rows}x{d_out.cols} and {d_in.rows}x{d_in.cols}"
        )

    reduction = _reduce(d_out)
    r = sum(1 for t in range(min(d_out.rows, d_out.cols)) if reduction.a[t][t] != 0)
    n = d_out.cols
    b = d_in.to_rows()
    # coordinates of d_in in the basis of V are V⁻¹·d_in; rows below r span the kernel
    coords = [
        [sum(reduction.v_inv[i][k] * b[k][j] for k in range(n)) for j in range(d_in.cols)]
        for i in range(r, n)
    ]
    return cokernel(IntMatrix.from_rows(coords, cols=d_in.cols))
