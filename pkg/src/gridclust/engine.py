"""Incremental grid evaluation: the additive structure of the criterion.

The engine keeps a mutable mirror of a grid model (sparse cells keyed by a
mixed-radix integer, per-variable cell rows, part statistics) so that the
cost change of a merge or a value/block move touches only the affected
terms: the edited variable's prior terms, the cell-distribution prior, the
two parts' totals, and the colliding cell rows. Full recomputation stays
available (`compute_total`) and is what the tests check deltas against.

Part ids are stable handles, not positions; the exposed ordering lives in
`order` and matches the compact part indices of a snapshot.
"""

from __future__ import annotations

import math

import numpy as np

from .dataset import CATEGORICAL, NUMERICAL, Dataset
from .cost import (group_value_prior_term, log_B, log_binomial,
                   log_factorial, log_factorial_array)

_MAX_KEY = 1 << 62


class GridEngine:
    def __init__(self, dataset: Dataset, assignments):
        self.dataset = dataset
        self.n = dataset.n_records
        self.K = dataset.K
        self.kinds = [dataset.kind(k) for k in range(self.K)]
        assigns = [np.asarray(a, dtype=np.int32) for a in assignments]

        self.caps = [int(a.max()) + 1 for a in assigns]
        if math.prod(self.caps) >= _MAX_KEY:
            raise ValueError("grid too fine for integer cell keys")
        self.strides = [1] * self.K
        for k in range(1, self.K):
            self.strides[k] = self.strides[k - 1] * self.caps[k - 1]

        self.atom_part = [a.copy() for a in assigns]
        self.weights = [dataset.atom_weights(k) for k in range(self.K)]

        # per-part bookkeeping, indexed by part id
        self.part_points: list[list[int]] = []
        self.part_sizes: list[list[int]] = []
        self.members: list = []
        self.versions: list[list[int]] = []
        self.order: list[list[int]] = []
        for k in range(self.K):
            cap = self.caps[k]
            w = self.weights[k]
            a = assigns[k]
            np_tot = np.zeros(cap, dtype=np.int64)
            np.add.at(np_tot, a, w)
            pts = np_tot.tolist()
            sizes = np.bincount(a, minlength=cap).tolist()
            if self.kinds[k] == CATEGORICAL:
                mem = [set() for _ in range(cap)]
                for v, j in enumerate(a.tolist()):
                    mem[j].add(v)
            else:
                if np.any(np.diff(a) < 0):
                    raise ValueError("numerical assignment must be sorted")
                bounds = np.searchsorted(a, np.arange(cap + 1))
                mem = [[int(bounds[j]), int(bounds[j + 1])] for j in range(cap)]
            self.part_points.append(pts)
            self.part_sizes.append(sizes)
            self.members.append(mem)
            self.versions.append([0] * cap)
            self.order.append(list(range(cap)))

        self.G = math.prod(self.caps)
        self._nvk_term = 0.0
        self._n_numerical = 0
        self.V = [0] * self.K
        for k in range(self.K):
            if self.kinds[k] == CATEGORICAL:
                counts = dataset.indexes[k].counts
                self.V[k] = int(len(counts))
                self._nvk_term += float(log_factorial_array(counts).sum())
            else:
                self._n_numerical += 1

        self._build_cells(assigns)
        self.total = self.compute_total()

    # -- construction -------------------------------------------------------

    def _build_cells(self, assigns) -> None:
        acells, acounts = self.dataset.atomic_cells()
        code = np.zeros(len(acounts), dtype=np.int64)
        for k in range(self.K):
            code += assigns[k][acells[:, k]].astype(np.int64) * self.strides[k]
        ucode, inverse = np.unique(code, return_inverse=True)
        sums = np.zeros(len(ucode), dtype=np.int64)
        np.add.at(sums, inverse, acounts)
        keys = ucode.tolist()
        vals = sums.tolist()
        self.cells: dict[int, int] = dict(zip(keys, vals))

        self.rows: list[dict[int, dict[int, int]]] = []
        for k in range(self.K):
            jcol = (ucode // self.strides[k]) % self.caps[k]
            reduced = ucode - jcol * self.strides[k]
            by_part: dict[int, dict[int, int]] = {j: {} for j in self.order[k]}
            ordk = np.argsort(jcol, kind="stable")
            js = jcol[ordk].tolist()
            rs = reduced[ordk].tolist()
            cs = sums[ordk].tolist()
            i = 0
            m = len(js)
            while i < m:
                j = js[i]
                d = by_part[j]
                while i < m and js[i] == j:
                    d[rs[i]] = cs[i]
                    i += 1
            self.rows.append(by_part)

    # -- accessors -----------------------------------------------------------

    def J(self, k: int) -> int:
        return len(self.order[k])

    def part_id_at(self, k: int, pos: int) -> int:
        return self.order[k][pos]

    def atom_profile(self, k: int, atom: int) -> dict[int, int]:
        """Cell counts of one atom, keyed by the reduced (other-variable)
        part key under the current assignment."""
        cs, cnts, starts = self.dataset.atom_slices(k)
        lo, hi = int(starts[atom]), int(starts[atom + 1])
        sub = cs[lo:hi]
        rk = np.zeros(hi - lo, dtype=np.int64)
        for k2 in range(self.K):
            if k2 == k:
                continue
            rk += (self.atom_part[k2][sub[:, k2]].astype(np.int64)
                   * self.strides[k2])
        prof: dict[int, int] = {}
        for key, c in zip(rk.tolist(), cnts[lo:hi].tolist()):
            prof[key] = prof.get(key, 0) + c
        return prof

    # -- deltas --------------------------------------------------------------

    def merge_delta_local(self, k: int, ida: int, idb: int) -> float:
        """Merge delta without the terms shared by every merge on variable k
        (cell-distribution prior and partition-choice prior)."""
        na, nb = self.part_points[k][ida], self.part_points[k][idb]
        d = log_factorial(na + nb) - log_factorial(na) - log_factorial(nb)
        if self.kinds[k] == CATEGORICAL:
            ma, mb = self.part_sizes[k][ida], self.part_sizes[k][idb]
            d += (group_value_prior_term(na + nb, ma + mb)
                  - group_value_prior_term(na, ma)
                  - group_value_prior_term(nb, mb))
        ra, rb = self.rows[k][ida], self.rows[k][idb]
        if len(rb) < len(ra):
            ra, rb = rb, ra
        get = rb.get
        lf = log_factorial
        for r, c in ra.items():
            c2 = get(r)
            if c2 is not None:
                d -= lf(c + c2) - lf(c) - lf(c2)
        return d

    def merge_delta_global(self, k: int) -> float:
        """The part of any merge delta on variable k that only depends on
        (J_k, G): identical for all candidate pairs of the variable."""
        j = self.J(k)
        g2 = self.G // j * (j - 1)
        d = (log_binomial(self.n + g2 - 1, g2 - 1)
             - log_binomial(self.n + self.G - 1, self.G - 1))
        if self.kinds[k] == CATEGORICAL:
            d += log_B(self.V[k], j - 1) - log_B(self.V[k], j)
        return d

    def move_delta(self, k: int, atom: int, ida: int, idb: int,
                   prof: dict[int, int] | None = None) -> float:
        """Full cost change of moving one atom (value or tie-block) from part
        ida to part idb of variable k."""
        w = int(self.weights[k][atom])
        na, nb = self.part_points[k][ida], self.part_points[k][idb]
        lf = log_factorial
        d = lf(na - w) - lf(na) + lf(nb + w) - lf(nb)
        if self.kinds[k] == CATEGORICAL:
            ma, mb = self.part_sizes[k][ida], self.part_sizes[k][idb]
            d += (group_value_prior_term(nb + w, mb + 1)
                  - group_value_prior_term(nb, mb))
            if ma > 1:
                d += (group_value_prior_term(na - w, ma - 1)
                      - group_value_prior_term(na, ma))
            else:
                # the source group disappears: J_k and G shrink
                j = self.J(k)
                g2 = self.G // j * (j - 1)
                d += log_B(self.V[k], j - 1) - log_B(self.V[k], j)
                d += (log_binomial(self.n + g2 - 1, g2 - 1)
                      - log_binomial(self.n + self.G - 1, self.G - 1))
        if prof is None:
            prof = self.atom_profile(k, atom)
        ra, rb = self.rows[k][ida], self.rows[k][idb]
        getb = rb.get
        for r, c in prof.items():
            ca = ra[r]
            cb = getb(r, 0)
            d += (lf(ca) - lf(ca - c)) - (lf(cb + c) - lf(cb))
        return d

    # -- edits ---------------------------------------------------------------

    def apply_merge(self, k: int, ida: int, idb: int) -> tuple[float, int]:
        """Merge part idb into ida (or vice versa); returns (delta, kept id).
        The merged part takes the lower of the two order positions."""
        delta = self.merge_delta_local(k, ida, idb) + self.merge_delta_global(k)
        rows_k = self.rows[k]
        keep, drop = ((ida, idb) if len(rows_k[ida]) >= len(rows_k[idb])
                      else (idb, ida))
        sk = self.strides[k]
        cells = self.cells
        rkeep = rows_k[keep]
        touched: list[set[int]] = [set() for _ in range(self.K)]
        for r, c in rows_k[drop].items():
            okey = r + drop * sk
            nkey = r + keep * sk
            del cells[okey]
            cells[nkey] = cells.get(nkey, 0) + c
            rkeep[r] = rkeep.get(r, 0) + c
            for k2 in range(self.K):
                if k2 == k:
                    continue
                s2 = self.strides[k2]
                j2 = (okey // s2) % self.caps[k2]
                d2 = self.rows[k2][j2]
                r2o = okey - j2 * s2
                d2.pop(r2o)
                r2n = nkey - j2 * s2
                d2[r2n] = d2.get(r2n, 0) + c
                touched[k2].add(j2)
        del rows_k[drop]

        self.part_points[k][keep] += self.part_points[k][drop]
        self.part_sizes[k][keep] += self.part_sizes[k][drop]
        mem = self.members[k]
        if self.kinds[k] == CATEGORICAL:
            for atom in mem[drop]:
                self.atom_part[k][atom] = keep
            mem[keep].update(mem[drop])
            mem[drop] = set()
        else:
            lo = min(mem[keep][0], mem[drop][0])
            hi = max(mem[keep][1], mem[drop][1])
            self.atom_part[k][mem[drop][0]:mem[drop][1]] = keep
            mem[keep][0], mem[keep][1] = lo, hi

        lst = self.order[k]
        pa, pb = lst.index(ida), lst.index(idb)
        if pa > pb:
            pa, pb = pb, pa
        j = len(lst)
        lst[pa] = keep
        del lst[pb]
        self.G = self.G // j * (j - 1)

        self.versions[k][keep] += 1
        for k2 in range(self.K):
            for j2 in touched[k2]:
                self.versions[k2][j2] += 1
        self.total += delta
        return delta, keep

    def apply_move(self, k: int, atom: int, ida: int, idb: int,
                   prof: dict[int, int] | None = None) -> float:
        """Move one atom from part ida to idb; deletes ida if it empties."""
        if self.kinds[k] == NUMERICAL:
            mem = self.members[k]
            if mem[idb][1] == mem[ida][0]:
                if atom != mem[ida][0]:
                    raise ValueError("only the edge tie-block may cross")
            elif mem[idb][0] == mem[ida][1]:
                if atom != mem[ida][1] - 1:
                    raise ValueError("only the edge tie-block may cross")
            else:
                raise ValueError("block move must cross an interval boundary")
            if self.part_sizes[k][ida] == 1:
                raise ValueError("block move would empty an interval")
        if prof is None:
            prof = self.atom_profile(k, atom)
        delta = self.move_delta(k, atom, ida, idb, prof=prof)
        sk = self.strides[k]
        cells = self.cells
        rows_k = self.rows[k]
        ra, rb = rows_k[ida], rows_k[idb]
        touched: list[set[int]] = [set() for _ in range(self.K)]
        for r, c in prof.items():
            okey = r + ida * sk
            nkey = r + idb * sk
            ca = cells[okey]
            if ca == c:
                del cells[okey]
                del ra[r]
            else:
                cells[okey] = ca - c
                ra[r] = ca - c
            cells[nkey] = cells.get(nkey, 0) + c
            rb[r] = rb.get(r, 0) + c
            for k2 in range(self.K):
                if k2 == k:
                    continue
                s2 = self.strides[k2]
                j2 = (okey // s2) % self.caps[k2]
                d2 = self.rows[k2][j2]
                r2o = okey - j2 * s2
                v2 = d2[r2o]
                if v2 == c:
                    del d2[r2o]
                else:
                    d2[r2o] = v2 - c
                r2n = nkey - j2 * s2
                d2[r2n] = d2.get(r2n, 0) + c
                touched[k2].add(j2)

        w = int(self.weights[k][atom])
        self.part_points[k][ida] -= w
        self.part_points[k][idb] += w
        self.part_sizes[k][ida] -= 1
        self.part_sizes[k][idb] += 1
        mem = self.members[k]
        self.atom_part[k][atom] = idb
        if self.kinds[k] == CATEGORICAL:
            mem[ida].discard(atom)
            mem[idb].add(atom)
            if self.part_sizes[k][ida] == 0:
                j = len(self.order[k])
                self.order[k].remove(ida)
                del rows_k[ida]
                self.G = self.G // j * (j - 1)
        else:
            if mem[idb][1] == mem[ida][0]:       # moving to the left neighbor
                mem[idb][1] += 1
                mem[ida][0] += 1
            else:                                # moving to the right neighbor
                mem[idb][0] -= 1
                mem[ida][1] -= 1

        if self.part_sizes[k][ida] > 0:
            self.versions[k][ida] += 1
        self.versions[k][idb] += 1
        for k2 in range(self.K):
            for j2 in touched[k2]:
                self.versions[k2][j2] += 1
        self.total += delta
        return delta

    # -- whole-grid evaluation ------------------------------------------------

    def compute_total(self) -> float:
        """Direct evaluation of the criterion from the current state."""
        n = self.n
        total = self._n_numerical * math.log(n)
        gv = 0.0
        within = -self._nvk_term
        for k in range(self.K):
            pts = self.part_points[k]
            order = self.order[k]
            within += float(log_factorial_array(
                np.array([pts[j] for j in order], dtype=np.int64)).sum())
            if self.kinds[k] == CATEGORICAL:
                total += math.log(self.V[k])
                total += log_B(self.V[k], len(order))
                sizes = self.part_sizes[k]
                for j in order:
                    gv += group_value_prior_term(pts[j], sizes[j])
        total += log_binomial(n + self.G - 1, self.G - 1)
        counts = np.fromiter(self.cells.values(), dtype=np.int64,
                             count=len(self.cells))
        total += log_factorial(n) - float(log_factorial_array(counts).sum())
        return total + gv + within

    def resync_total(self) -> None:
        """Replace the incrementally tracked total with a fresh evaluation
        (kills float drift between optimization phases)."""
        self.total = self.compute_total()

    def snapshot(self):
        """Materialize the current state as an immutable GridModel with
        compact part indices (order positions)."""
        from .grid import model_from_assignments
        assigns = []
        for k in range(self.K):
            lut = np.zeros(self.caps[k], dtype=np.int32)
            lut[self.order[k]] = np.arange(len(self.order[k]), dtype=np.int32)
            assigns.append(lut[self.atom_part[k]])
        return model_from_assignments(self.dataset, assigns)

    def copy(self) -> "GridEngine":
        new = object.__new__(GridEngine)
        new.dataset = self.dataset
        new.n = self.n
        new.K = self.K
        new.kinds = self.kinds
        new.caps = self.caps
        new.strides = self.strides
        new.weights = self.weights
        new.atom_part = [a.copy() for a in self.atom_part]
        new.part_points = [list(p) for p in self.part_points]
        new.part_sizes = [list(p) for p in self.part_sizes]
        new.members = [[set(s) for s in m] if self.kinds[k] == CATEGORICAL
                       else [list(r) for r in m]
                       for k, m in enumerate(self.members)]
        new.versions = [list(v) for v in self.versions]
        new.order = [list(o) for o in self.order]
        new.G = self.G
        new.V = self.V
        new._nvk_term = self._nvk_term
        new._n_numerical = self._n_numerical
        new.cells = dict(self.cells)
        new.rows = [{j: dict(d) for j, d in by.items()} for by in self.rows]
        new.total = self.total
        return new


def engine_for(model) -> GridEngine:
    """Shared read-only engine attached to an immutable model; used by the
    public delta functions. Never apply edits through it."""
    if model._engine is None:
        model._engine = GridEngine(model.dataset, model.atom_to_part)
    return model._engine
