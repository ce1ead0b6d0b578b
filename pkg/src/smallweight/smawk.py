"""Row maxima of totally monotone staircase matrices in compact form.

The matrices handled here are read-only views with 1-based indices whose
finite entries form a *reverse falling staircase*: each row's finite entries
are a prefix of its columns and the prefix lengths never shrink going down.
On the finite region the view satisfies the convex (inverse) Monge condition

    A[i1, j1] + A[i2, j2] >= A[i1, j2] + A[i2, j1]   for i1 < i2, j1 < j2,

which makes leftmost row maxima non-decreasing down the rows.  The output is
therefore representable in compact *breakpoint* form: ``n_cols + 1`` row
indices ``r_1 = 1 <= r_2 <= ... <= r_{n_cols+1} = n_rows + 1`` such that rows
``r_k <= i < r_{k+1}`` have their leftmost maximum in column ``k``.

``smawk_compact`` computes the breakpoints with
``O(n_cols * (1 + log(ceil(n_rows / n_cols))))`` entry evaluations: the
classic reduce-and-halve recursion when rows are at most twice the columns,
otherwise the recursion runs on every ``ceil(n_rows/n_cols)``-th row and the
gaps are filled by divide and conquer over the bracketed column ranges.

Ties always resolve to the *leftmost* column.  Rows with no finite entry map
to column 1 by convention; consumers must recheck finiteness before using a
reported maximum.  Undefined entries are ``None`` and never participate in
arithmetic.
"""

from __future__ import annotations

from typing import Callable, Protocol

from .model import Counters


class MatrixView(Protocol):
    """Read-only matrix with 1-based indices and optional undefined entries."""

    n_rows: int
    n_cols: int

    def entry(self, i: int, j: int) -> int | None: ...


RowMaximaBreakpoints = tuple[int, ...]


def _strictly_better(a: int | None, b: int | None) -> bool:
    """True when a candidate value ``a`` should replace incumbent ``b``."""
    if a is None:
        return False
    if b is None:
        return True
    return a > b


def _classic_smawk(
    rows: list[int],
    cols: list[int],
    ev: Callable[[int, int], int | None],
    out: dict[int, int],
) -> None:
    """Leftmost row maxima for the given row/column subsets (0-based ids).

    Standard reduce-and-halve: prune columns that can never hold a leftmost
    maximum, recurse on the odd-position rows, then fill the even-position
    rows by scanning the column range bracketed by their neighbours.
    """
    if not rows:
        return
    stack: list[int] = []
    for c in cols:
        while stack:
            probe_row = rows[len(stack) - 1]
            if _strictly_better(ev(probe_row, c), ev(probe_row, stack[-1])):
                stack.pop()
            else:
                break
        if len(stack) < len(rows):
            stack.append(c)
    survivors = stack
    _classic_smawk(rows[1::2], survivors, ev, out)
    pos = 0
    for k in range(0, len(rows), 2):
        row = rows[k]
        if k + 1 < len(rows):
            limit_col = out[rows[k + 1]]
        else:
            limit_col = survivors[-1]
        best_col: int | None = None
        best_val: int | None = None
        while pos < len(survivors):
            c = survivors[pos]
            if c > limit_col:
                break
            v = ev(row, c)
            if best_col is None or _strictly_better(v, best_val):
                best_col = c
                best_val = v
            pos += 1
        pos -= 1  # the next even row may share this column
        assert best_col is not None
        out[row] = best_col if best_val is not None else 0


def _fill_gaps(
    r_lo: int,
    c_lo: int,
    r_hi: int,
    c_hi: int,
    n_cols: int,
    ev: Callable[[int, int], int | None],
    marks: dict[int, int],
) -> None:
    """Resolve rows strictly between two rows with known maxima (0-based).

    Knowing the leftmost maxima of the bracket rows confines every row in
    between to the column interval [c_lo, c_hi]; equal bracket columns settle
    the whole gap without evaluating anything.
    """
    if r_hi - r_lo <= 1 or c_lo == c_hi:
        return
    mid = (r_lo + r_hi) // 2
    best_col: int | None = None
    best_val: int | None = None
    for c in range(c_lo, c_hi + 1):
        v = ev(mid, c)
        if best_col is None or _strictly_better(v, best_val):
            best_col = c
            best_val = v
    assert best_col is not None
    if best_val is None:
        best_col = 0  # no finite entry: column 1 by convention
    marks[mid] = best_col
    _fill_gaps(r_lo, c_lo, mid, best_col, n_cols, ev, marks)
    _fill_gaps(mid, best_col, r_hi, c_hi, n_cols, ev, marks)


def smawk_compact(
    view: MatrixView, counters: Counters | None = None
) -> RowMaximaBreakpoints:
    """Compact leftmost row maxima of a convex Monge staircase view.

    Every call to ``view.entry`` is counted in ``counters.entry_evals`` when
    counters are supplied.
    """
    m, n = view.n_rows, view.n_cols
    if n < 1:
        raise ValueError("view must have at least one column")
    if m == 0:
        return tuple([1] * (n + 1))

    if counters is None:

        def ev(i: int, j: int) -> int | None:
            return view.entry(i + 1, j + 1)

    else:

        def ev(i: int, j: int) -> int | None:
            counters.entry_evals += 1
            return view.entry(i + 1, j + 1)

    marks: dict[int, int] = {}
    if m <= 2 * n:
        _classic_smawk(list(range(m)), list(range(n)), ev, marks)
        ordered = sorted(marks.items())
    else:
        gap = -(-m // n)
        sampled = list(range(gap - 1, m, gap))
        if sampled[-1] != m - 1:
            sampled.append(m - 1)
        _classic_smawk(sampled, list(range(n)), ev, marks)
        prev_r, prev_c = -1, 0
        for r in sampled:
            _fill_gaps(prev_r, prev_c, r, marks[r], n, ev, marks)
            prev_r, prev_c = r, marks[r]
        ordered = sorted(marks.items())

    # Consecutive resolved rows either share a column (the rows between share
    # it too) or are adjacent (the column steps exactly at the second row).
    breakpoints = [0] * (n + 1)
    prev_col = 0
    for row, col in ordered:
        if col > prev_col:
            for c in range(prev_col + 1, col + 1):
                breakpoints[c] = row
            prev_col = col
    for c in range(prev_col + 1, n + 1):
        breakpoints[c] = m
    return tuple(b + 1 for b in breakpoints)


def expand_row_maxima(
    breakpoints: RowMaximaBreakpoints,
) -> list[int]:
    """Expand compact breakpoints into one leftmost-maximum column per row."""
    if not breakpoints or breakpoints[0] != 1:
        raise ValueError("breakpoints must start at row 1")
    out: list[int] = []
    for col, (lo, hi) in enumerate(zip(breakpoints, breakpoints[1:]), start=1):
        if hi < lo:
            raise ValueError("breakpoints must be non-decreasing")
        out.extend([col] * (hi - lo))
    return out


def verify_monge(
    view: MatrixView,
) -> bool | tuple[tuple[int, int], tuple[int, int]]:
    """Check the staircase shape and the convex Monge condition.

    Returns True, or the corners ``((i1, j1), (i2, j2))`` of the first
    violated adjacent quadruple in row-major order (local violations imply
    global ones on staircase matrices, and vice versa).  Shape violations
    (finite entries not forming a widening prefix staircase) raise
    ValueError because they are not expressible as a quadruple.
    """
    m, n = view.n_rows, view.n_cols
    widths: list[int] = []
    for i in range(1, m + 1):
        width = 0
        seen_none = False
        for j in range(1, n + 1):
            if view.entry(i, j) is None:
                seen_none = True
            elif seen_none:
                raise ValueError(
                    f"row {i}: finite entry at column {j} after an undefined one"
                )
            else:
                width = j
        if widths and width < widths[-1]:
            raise ValueError(f"row {i}: finite prefix shrinks from row {i - 1}")
        widths.append(width)
    for i in range(1, m):
        upper = widths[i - 1]
        for j in range(1, upper):
            a = view.entry(i, j)
            b = view.entry(i + 1, j + 1)
            c = view.entry(i, j + 1)
            d = view.entry(i + 1, j)
            assert a is not None and b is not None
            assert c is not None and d is not None
            if a + b < c + d:
                return ((i, j), (i + 1, j + 1))
    return True
