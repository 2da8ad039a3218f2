"""R-vine copula: Dissmann structure selection, sequential fitting,
joint log-density, simulation, and the Gaussian/Independence baselines.

Structure is stored as a nested list of trees; each edge carries a
conditioned pair (a, b), a conditioning set D and a fitted PairCopula.
Conditional cdfs F(u_j | u_S) are computed by recursive h-function
composition over the edge index, which also drives the simulation
algorithm (inverse-Rosenblatt along a valid sampling order).
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .copulas import DEFAULT_FAMILIES, EPS, PairCopula, fit_pair, kendall_tau
from .errors import StructureError, ValidationError

__all__ = ["RVineCopula", "VineEdge", "independence_vine"]


@dataclass
class VineEdge:
    conditioned: tuple          # (a, b), a < b, zero-based column indices
    conditioning: frozenset
    copula: PairCopula = None
    tau: float = 0.0
    # pseudo-observations used during sequential fitting, keyed by the
    # conditioned variable they expose for the next tree level
    _pseudo: dict = field(default_factory=dict, repr=False)

    @property
    def constraint(self) -> frozenset:
        return frozenset(self.conditioned) | self.conditioning

    def label(self) -> str:
        a, b = (x + 1 for x in self.conditioned)
        if self.conditioning:
            cond = ",".join(str(x + 1) for x in sorted(self.conditioning))
            return f"{a},{b};{cond}"
        return f"{a},{b}"


def _prim_mst(nodes, weights, allowed=None):
    """Maximum spanning tree by Prim with deterministic lexicographic
    tie-break on edge labels. ``weights[(i, j)]`` keyed by sorted pairs;
    ``allowed`` optionally restricts candidate pairs."""
    nodes = list(nodes)
    in_tree = {nodes[0]}
    out = set(nodes[1:])
    edges = []
    while out:
        best = None
        for i in sorted(in_tree):
            for j in sorted(out):
                key = (i, j) if i <= j else (j, i)
                if allowed is not None and key not in allowed:
                    continue
                w = weights[key]
                if best is None or w > best[0] + 1e-15 or (abs(w - best[0]) <= 1e-15 and key < best[1]):
                    best = (w, key)
        if best is None:
            raise StructureError("proximity condition leaves the tree graph disconnected")
        _, key = best
        edges.append(key)
        new = key[1] if key[0] in in_tree else key[0]
        in_tree.add(new)
        out.discard(new)
    return edges


class RVineCopula(BaseEstimator):
    """Regular-vine copula estimator (Dissmann sequential selection).

    Parameters
    ----------
    families : sequence of family names considered per edge.
    criterion : 'aic' or 'bic' family selection.
    independence_level : Kendall-tau test level for the per-edge
        independence short-circuit, or None to disable.
    trunc_level : fit only the first k trees (independence above).
    tree_weight : 'tau' (default) or 'spearman' edge weight for the
        maximum spanning trees; taus stored on edges are Kendall either way.
    """

    def __init__(
        self,
        families=DEFAULT_FAMILIES,
        criterion="aic",
        independence_level=0.05,
        trunc_level=None,
        tree_weight="tau",
    ):
        self.families = tuple(families)
        self.criterion = criterion
        self.independence_level = independence_level
        self.trunc_level = trunc_level
        self.tree_weight = tree_weight

    def _edge_weight(self, ua, ub) -> float:
        if self.tree_weight == "tau":
            return abs(kendall_tau(ua, ub))
        if self.tree_weight == "spearman":
            from scipy.stats import spearmanr

            return abs(float(spearmanr(ua, ub).statistic))
        raise ValidationError(f"tree_weight must be 'tau' or 'spearman', got {self.tree_weight!r}")

    # ------------------------------------------------------------------ fit
    def _check_udata(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim != 2 or u.shape[1] < 2:
            raise ValidationError("u-data must be an n x d matrix with d >= 2")
        if u.shape[0] < 30:
            raise ValidationError(f"need at least 30 rows of u-data, got {u.shape[0]}")
        if np.any(u <= 0.0) or np.any(u >= 1.0):
            raise ValidationError("u-data must lie strictly inside (0, 1)")
        for j in range(u.shape[1]):
            if np.ptp(u[:, j]) == 0:
                raise ValidationError(f"column {j} is constant; cannot rank degenerate data")
        return u

    def fit(self, u):
        u = self._check_udata(u)
        n, d = u.shape
        self.d_ = d
        trees = []

        # tree 1: nodes are variables, edges from the maximum spanning tree
        # on |Kendall tau| weights
        weights = {}
        taus = {}
        for i in range(d):
            for j in range(i + 1, d):
                taus[(i, j)] = kendall_tau(u[:, i], u[:, j])
                weights[(i, j)] = self._edge_weight(u[:, i], u[:, j])
        mst = _prim_mst(range(d), weights)
        level_edges = []
        for (i, j) in sorted(mst):
            e = VineEdge((i, j), frozenset(), tau=taus[(i, j)])
            self._fit_edge(e, u[:, i], u[:, j])
            level_edges.append(e)
        trees.append(level_edges)

        # deeper trees on h-transformed pseudo-observations
        for level in range(2, d):
            prev = trees[-1]
            nodes = list(range(len(prev)))
            cand = {}
            taus = {}
            weights = {}
            for ii in range(len(prev)):
                for jj in range(ii + 1, len(prev)):
                    e1, e2 = prev[ii], prev[jj]
                    if not (set(e1.conditioned) | e1.conditioning) & (set(e2.conditioned) | e2.conditioning):
                        continue
                    shared = e1.constraint & e2.constraint
                    if len(shared) != level - 1:
                        continue  # proximity condition
                    conditioned = tuple(sorted(e1.constraint ^ e2.constraint))
                    if len(conditioned) != 2:
                        continue
                    a, b = conditioned
                    ua = e1._pseudo[a] if a in e1._pseudo else e2._pseudo[a]
                    ub = e1._pseudo[b] if b in e1._pseudo else e2._pseudo[b]
                    key = (ii, jj)
                    cand[key] = (conditioned, frozenset(shared), ua, ub)
                    taus[key] = kendall_tau(ua, ub)
                    weights[key] = self._edge_weight(ua, ub)
            mst = _prim_mst(nodes, weights, allowed=set(cand))
            level_edges = []
            for key in sorted(mst):
                conditioned, shared, ua, ub = cand[key]
                e = VineEdge(conditioned, shared, tau=taus[key])
                if self.trunc_level is not None and level > self.trunc_level:
                    e.copula = PairCopula("independence", loglik=0.0)
                    e._pseudo = {conditioned[0]: ua, conditioned[1]: ub}
                else:
                    self._fit_edge(e, ua, ub)
                level_edges.append(e)
            trees.append(level_edges)

        self.trees_ = trees
        self._index_edges()
        self._assert_structure()
        self.loglik_ = float(sum(e.copula.loglik for lvl in trees for e in lvl))
        self.n_params_ = int(sum(e.copula.n_params for lvl in trees for e in lvl))
        self.aic_ = -2.0 * self.loglik_ + 2.0 * self.n_params_
        self.bic_ = -2.0 * self.loglik_ + np.log(n) * self.n_params_
        # drop fitting buffers
        for lvl in trees:
            for e in lvl:
                e._pseudo = {}
        return self

    def select_structure(self, u):
        """Fit and return the selected structure only, as one list per tree
        of ``(conditioned, conditioning)`` pairs. Deeper trees require the
        shallower copulas' h-transforms, so selection implies fitting."""
        self.fit(u)
        return [[(e.conditioned, e.conditioning) for e in lvl] for lvl in self.trees_]

    def _fit_edge(self, e: VineEdge, ua, ub):
        e.copula = fit_pair(
            ua, ub,
            families=self.families,
            criterion=self.criterion,
            independence_level=self.independence_level,
        )
        a, b = e.conditioned
        e._pseudo = {
            a: np.clip(e.copula.hfunc(ua, ub, cond_on="second"), EPS, 1 - EPS),
            b: np.clip(e.copula.hfunc(ua, ub, cond_on="first"), EPS, 1 - EPS),
        }

    # -------------------------------------------------------- structure ops
    def _index_edges(self):
        self._edges = {}
        for lvl in self.trees_:
            for e in lvl:
                self._edges[(frozenset(e.conditioned), e.conditioning)] = e

    def _assert_structure(self):
        d = self.d_
        total = sum(len(lvl) for lvl in self.trees_)
        if total != d * (d - 1) // 2:
            raise StructureError(f"expected {d * (d - 1) // 2} edges, found {total}")
        for k, lvl in enumerate(self.trees_, start=1):
            if len(lvl) != d - k:
                raise StructureError(f"tree {k} must have {d - k} edges, found {len(lvl)}")
            for e in lvl:
                if len(e.conditioning) != k - 1:
                    raise StructureError(f"edge {e.label()} has wrong conditioning-set size for tree {k}")
        # proximity: every edge of tree k >= 2 joins two tree-(k-1) edges
        # sharing a node
        for k in range(1, len(self.trees_)):
            prev_constraints = [e.constraint for e in self.trees_[k - 1]]
            for e in self.trees_[k]:
                parents = [c for c in prev_constraints if c <= e.constraint]
                if len(parents) < 2 or len(parents[0] & parents[1]) != k:
                    raise StructureError(f"proximity condition violated at edge {e.label()}")

    # --------------------------------------------------- conditional cdfs
    def _edge_for(self, j, S):
        """Edge with conditioned pair {j, l}, conditioning S - {l}, l in S."""
        for l in sorted(S):
            e = self._edges.get((frozenset((j, l)), S - {l}))
            if e is not None:
                return l, e
        raise StructureError(
            f"no edge provides F({j + 1} | {sorted(x + 1 for x in S)}) in this vine structure"
        )

    def _cond_cdf(self, U, j, S, memo):
        key = (j, S)
        if key in memo:
            return memo[key]
        if not S:
            out = U[:, j]
        else:
            l, e = self._edge_for(j, S)
            D = S - {l}
            uj = self._cond_cdf(U, j, D, memo)
            ul = self._cond_cdf(U, l, D, memo)
            a, b = e.conditioned
            if j == a:
                out = e.copula.hfunc(uj, ul, cond_on="second")
            else:
                out = e.copula.hfunc(ul, uj, cond_on="first")
            out = np.clip(out, EPS, 1 - EPS)
        memo[key] = out
        return out

    def _cond_quantile(self, U, j, S, w, memo):
        """u_j with F(u_j | u_S) = w, via the hinv cascade."""
        if not S:
            return w
        l, e = self._edge_for(j, S)
        D = S - {l}
        ul = self._cond_cdf(U, l, D, memo)
        a, b = e.conditioned
        if j == a:
            inner = e.copula.hinv(w, ul, cond_on="second")
        else:
            inner = e.copula.hinv(w, ul, cond_on="first")
        return self._cond_quantile(U, j, D, np.clip(inner, EPS, 1 - EPS), memo)

    # ------------------------------------------------------------- density
    def log_density(self, u):
        """Joint log copula density: sum of log pair-copula densities at
        recursively h-transformed arguments."""
        self._require_fitted()
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if u.shape[1] != self.d_:
            raise ValidationError(f"expected {self.d_} columns, got {u.shape[1]}")
        memo = {}
        total = np.zeros(u.shape[0])
        for lvl in self.trees_:
            for e in lvl:
                a, b = e.conditioned
                ua = self._cond_cdf(u, a, e.conditioning, memo)
                ub = self._cond_cdf(u, b, e.conditioning, memo)
                total = total + e.copula.logpdf(ua, ub)
        return total if len(total) > 1 else float(total[0])

    # ---------------------------------------------------------- sampling
    def sampling_order(self, prefix=()):
        """A valid inverse-Rosenblatt sampling order, optionally starting
        with the variables in ``prefix``. Raises StructureError when the
        structure admits no such order."""
        self._require_fitted()
        prefix = tuple(prefix)
        all_edges = [e for lvl in self.trees_ for e in lvl]

        def search(active, remaining):
            if len(remaining) == 2:
                a, b = sorted(remaining)
                for order in ((a, b), (b, a)):
                    full = list(order)
                    if self._prefix_ok(full, prefix, len(remaining)):
                        yield full
                return
            top = [e for e in active if len(e.constraint) == len(remaining)]
            if len(top) != 1:
                return
            cands = sorted(top[0].conditioned, reverse=True)
            for elim in cands:
                kept = [e for e in active if elim not in e.constraint]
                for order in search(kept, remaining - {elim}):
                    yield order + [elim]

        for order in search(all_edges, frozenset(range(self.d_))):
            if order[: len(prefix)] == list(prefix):
                return order
        if prefix:
            raise StructureError(
                f"variables {[p + 1 for p in prefix]} do not form a valid sampling "
                "prefix for this vine structure"
            )
        raise StructureError("no valid sampling order found (invalid structure)")

    @staticmethod
    def _prefix_ok(order, prefix, n):
        return True  # full prefix check happens on the assembled order

    def simulate(self, n, rng=None, fixed=None):
        """Draw n rows of u-data by inverse-Rosenblatt transform.

        ``fixed`` maps column index -> value (scalar or length-n array);
        the fixed variables must form a prefix of a valid sampling order
        (any subset is allowed when all copulas are independence).
        """
        self._require_fitted()
        if n < 1:
            raise ValidationError("n must be >= 1")
        if rng is None or not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        fixed = dict(fixed or {})
        if self._all_independence():
            order = list(fixed) + [j for j in range(self.d_) if j not in fixed]
        else:
            order = self.sampling_order(prefix=tuple(sorted(fixed)))
        U = np.empty((n, self.d_))
        memo = {}
        for k, j in enumerate(order):
            S = frozenset(order[:k])
            if j in fixed:
                U[:, j] = np.clip(np.broadcast_to(np.asarray(fixed[j], dtype=float), (n,)), EPS, 1 - EPS)
                continue
            w = rng.uniform(EPS, 1 - EPS, size=n)
            if self._all_independence():
                U[:, j] = w
                continue
            U[:, j] = self._cond_quantile(U, j, S, w, memo)
            memo.clear()  # U gained a column; cached conditionals stay valid
            memo = {}
        return U

    def conditional_simulate(self, fixed: dict, n, rng=None):
        """Sample completions of the free coordinates given ``fixed``."""
        if not fixed:
            return self.simulate(n, rng)
        return self.simulate(n, rng, fixed=fixed)

    def rosenblatt(self, u):
        """Forward Rosenblatt transform along the sampling order; inverse
        of :meth:`simulate`'s construction."""
        self._require_fitted()
        u = np.atleast_2d(np.asarray(u, dtype=float))
        order = self.sampling_order()
        memo = {}
        W = np.empty_like(u)
        for k, j in enumerate(order):
            S = frozenset(order[:k])
            W[:, j] = self._cond_cdf(u, j, S, memo)
        return W

    def _all_independence(self):
        return all(e.copula.family == "independence" for lvl in self.trees_ for e in lvl)

    # ------------------------------------------------------------- helpers
    def _require_fitted(self):
        if not hasattr(self, "trees_"):
            raise ValidationError("vine is not fitted")

    def tree_edges(self, level: int):
        """Edge labels of tree ``level`` (1-based), e.g. '1,2' or '2,4;1,3'."""
        self._require_fitted()
        return [e.label() for e in self.trees_[level - 1]]

    # ------------------------------------------------------- serialization
    def to_dict(self) -> dict:
        self._require_fitted()
        return {
            "version": 1,
            "d": self.d_,
            "params": self.get_params(),
            "trees": [
                [
                    {
                        "conditioned": list(e.conditioned),
                        "conditioning": sorted(e.conditioning),
                        "tau": e.tau,
                        "copula": e.copula.to_dict(),
                    }
                    for e in lvl
                ]
                for lvl in self.trees_
            ],
            "loglik": self.loglik_,
            "aic": self.aic_,
            "bic": self.bic_,
            "n_params": self.n_params_,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RVineCopula":
        if doc.get("version") != 1:
            raise ValidationError(f"unsupported vine document version {doc.get('version')!r}")
        params = doc.get("params", {})
        params["families"] = tuple(params.get("families", DEFAULT_FAMILIES))
        m = cls(**params)
        m.d_ = doc["d"]
        m.trees_ = [
            [
                VineEdge(
                    tuple(e["conditioned"]),
                    frozenset(e["conditioning"]),
                    copula=PairCopula.from_dict(e["copula"]),
                    tau=e["tau"],
                )
                for e in lvl
            ]
            for lvl in doc["trees"]
        ]
        for lvl in m.trees_:
            for e in lvl:
                if e.copula.loglik is None:
                    object.__setattr__(e.copula, "loglik", 0.0)
        m._index_edges()
        m._assert_structure()
        m.loglik_ = doc["loglik"]
        m.aic_ = doc["aic"]
        m.bic_ = doc["bic"]
        m.n_params_ = doc["n_params"]
        return m

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RVineCopula":
        return cls.from_dict(json.loads(Path(path).read_text()))


def independence_vine(d: int) -> RVineCopula:
    """All-independence baseline on a path (D-vine) structure; log-density
    is identically zero."""
    if d < 2:
        raise ValidationError("need d >= 2")
    m = RVineCopula(families=("independence",))
    m.d_ = d
    trees = []
    for level in range(1, d):
        lvl = []
        for i in range(d - level):
            conditioned = (i, i + level)
            conditioning = frozenset(range(i + 1, i + level))
            lvl.append(
                VineEdge(conditioned, conditioning, copula=PairCopula("independence", loglik=0.0))
            )
        trees.append(lvl)
    m.trees_ = trees
    m._index_edges()
    m._assert_structure()
    m.loglik_ = 0.0
    m.n_params_ = 0
    m.aic_ = 0.0
    m.bic_ = 0.0
    return m


def gaussian_vine(u, criterion="aic") -> RVineCopula:
    """Baseline vine restricted to Gaussian pair-copulas on every edge."""
    return RVineCopula(families=("gaussian",), criterion=criterion, independence_level=None).fit(u)
