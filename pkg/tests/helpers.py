"""Shared fixture builders for the test suite.

All networks here are small hand-checkable examples: two feedforward
networks (two and five nodes), a five-node network whose admissible maps
commute with a five-element monoid of non-invertible symmetries, and a
five-node two-colour network with six quotients. Random data is drawn from
seeded random.Random instances so every test is reproducible.
"""

import random
from fractions import Fraction

from quiverdyn.network import ColouredNetwork, ResponseFamily
from quiverdyn.polynomial import Poly
from quiverdyn.quiver import Quiver, QuiverRepresentation
from quiverdyn.tuples import PolyMap, PolyMapTuple


def feedforward_pair_network():
    """Two-node feedforward network: 1 drives 2, both with self-loops."""
    return ColouredNetwork(
        nodes=[("1", "c1"), ("2", "c2")],
        edges=[("e1", "1", "1", "s1"), ("e2", "2", "2", "s2"),
               ("e3", "1", "2", "b")])


def feedforward_chain_network():
    """Five-node feedforward-type network with twelve edges.

    Component dependencies: F1(x1), F2(x1,x2), F3(x1,x2,x3), F4(x1,x3,x4),
    F5(x3,x4,x5). Every node and every edge gets its own colour, so the
    symmetry groupoid is trivial and any dependency-respecting map is
    admissible.
    """
    nodes = [(str(i), f"c{i}") for i in range(1, 6)]
    plain = [("1", "2"), ("1", "3"), ("2", "3"), ("1", "4"), ("3", "4"),
             ("3", "5"), ("4", "5")]
    edges = [(f"s{i}", str(i), str(i), f"ks{i}") for i in range(1, 6)]
    edges += [(f"e{k}", s, t, f"ke{k}")
              for k, (s, t) in enumerate(plain, start=1)]
    return ColouredNetwork(nodes, edges)


def two_type_network():
    """Two-colour network (three 'y' nodes, two 'g' nodes) with six quotients.

    Each y node is targeted by its own-state loop and two b edges; each g
    node by its own-state loop, one o edge and one r edge.
    """
    nodes = [("1", "y"), ("2", "y"), ("3", "y"), ("4", "g"), ("5", "g")]
    edges = [
        ("sy1", "1", "1", "sy"), ("sy2", "2", "2", "sy"),
        ("sy3", "3", "3", "sy"),
        ("sg4", "4", "4", "sg"), ("sg5", "5", "5", "sg"),
        ("b1", "3", "1", "b"), ("b2", "2", "1", "b"),
        ("b3", "3", "2", "b"), ("b4", "2", "2", "b"),
        ("b5", "1", "3", "b"), ("b6", "2", "3", "b"),
        ("o1", "1", "4", "o"), ("o2", "3", "5", "o"),
        ("r1", "4", "4", "r"), ("r2", "4", "5", "r"),
    ]
    return ColouredNetwork(nodes, edges)


def monoid_network():
    """Five same-coloured nodes, each with own-state, one b and one r input.

    Input pattern per node (own, b, r): 1:(x1,x2,x3), 2:(x2,x4,x3),
    3:(x3,x5,x3), 4:(x4,x4,x3), 5:(x5,x4,x3).
    """
    nodes = [(str(i), "c") for i in range(1, 6)]
    bsrc = {"1": "2", "2": "4", "3": "5", "4": "4", "5": "4"}
    edges = [(f"s{i}", str(i), str(i), "s") for i in range(1, 6)]
    edges += [(f"b{i}", bsrc[str(i)], str(i), "b") for i in range(1, 6)]
    edges += [(f"r{i}", "3", str(i), "r") for i in range(1, 6)]
    return ColouredNetwork(nodes, edges)


def monoid_maps():
    """The five non-invertible symmetries of the monoid network.

    Returned as 5x5 exact 0/1 matrices m0..m4 acting on (x1..x5):
    m0 = identity, m1: (x2,x4,x3,x4,x5), m2: (x3,x5,x3,x4,x5),
    m3: (x4,x4,x3,x4,x5), m4: (x5,x4,x3,x4,x5).
    """
    patterns = [
        (1, 2, 3, 4, 5),
        (2, 4, 3, 4, 5),
        (3, 5, 3, 4, 5),
        (4, 4, 3, 4, 5),
        (5, 4, 3, 4, 5),
    ]
    mats = []
    for pat in patterns:
        mats.append(tuple(
            tuple(Fraction(int(j + 1 == src)) for j in range(5))
            for src in pat))
    return mats


def random_poly(rng, nvars, max_degree=3, n_terms=4, coeff_range=3,
                constant=True):
    """Sparse random polynomial with small integer coefficients."""
    terms = {}
    for _ in range(n_terms):
        deg = rng.randint(0 if constant else 1, max_degree)
        exps = [0] * nvars
        for _ in range(deg):
            exps[rng.randrange(nvars)] += 1
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            terms[tuple(exps)] = terms.get(tuple(exps), 0) + c
    return Poly(nvars, {e: Fraction(c) for e, c in terms.items() if c})


def symmetrize_pair(p, i, j):
    """Average a polynomial with its image under swapping variables i, j."""
    var_map = list(range(p.nvars))
    var_map[i], var_map[j] = j, i
    q = p.embed(p.nvars, var_map)
    return (p + q) * Fraction(1, 2)


def random_response_family(N, seed, max_degree=3, param_dim=0):
    """Random admissible response family on a coloured network.

    For every node colour a sparse random response is drawn in the
    template's slot variables; slots sharing an edge colour are then
    symmetrized pairwise so the groupoid conditions hold exactly.
    """
    from quiverdyn.network import AdmissibleTemplate

    rng = random.Random(seed)
    tpl = AdmissibleTemplate.of(N)
    responses = {}
    for colour, sig in sorted(tpl.slots.items()):
        nvars = tpl.response_nvars(N, colour, param_dim)
        dims = tpl.slot_dims(N, colour)
        starts = [sum(dims[:i]) for i in range(len(dims))]
        outs = []
        for _ in range(N.internal_dim[colour]):
            p = random_poly(rng, nvars, max_degree=max_degree)
            for i in range(len(sig)):
                for j in range(i + 1, len(sig)):
                    if sig[i][0] == sig[j][0]:
                        # equal slot dims are guaranteed by matching colours
                        for k in range(dims[i]):
                            p = symmetrize_pair(p, starts[i] + k,
                                                starts[j] + k)
            outs.append(p)
        responses[colour] = PolyMap(outs, nvars=nvars)
    return ResponseFamily(N, responses, param_dim=param_dim)


def single_vertex_tuple(polys):
    """A tuple on the one-vertex quiver whose only arrow is the identity."""
    n = len(polys)
    quiver = Quiver(["v"], [("id", "v", "v")])
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rep = QuiverRepresentation(quiver, {"v": n}, {"id": eye}, mode="exact")
    return PolyMapTuple(rep, {"v": PolyMap(polys)})


def hopf_tuple():
    """Planar fixture with rotational linear part and mixed nonlinear terms:
    x' = -y + x^2 + x*y + x^3,  y' = x + y^2 + x^2*y."""
    p1 = Poly(2, {(0, 1): -1, (2, 0): 1, (1, 1): 1, (3, 0): 1})
    p2 = Poly(2, {(1, 0): 1, (0, 2): 1, (2, 1): 1})
    return single_vertex_tuple([p1, p2])


def cm_feedforward_tuple():
    """Two-vertex feedforward fixture for center-manifold jets.

    Big vertex: x' = x^2, y' = -y + x^2; small vertex: X' = X^2; the arrow
    projects (x, y) onto x. The exact graph map is
    phi(x) = x^2 - 2 x^3 + 6 x^4 + O(x^5).
    """
    quiver = Quiver(["big", "small"], [("p", "big", "small"),
                                       ("ib", "big", "big"),
                                       ("is", "small", "small")])
    rep = QuiverRepresentation(
        quiver, {"big": 2, "small": 1},
        {"p": [[Fraction(1), Fraction(0)]],
         "ib": [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]],
         "is": [[Fraction(1)]]},
        mode="exact")
    fb = PolyMap([Poly(2, {(2, 0): 1}),
                  Poly(2, {(0, 1): -1, (2, 0): 1})])
    fs = PolyMap([Poly(1, {(2,): 1})])
    return PolyMapTuple(rep, {"big": fb, "small": fs})


def cm_coupled_tuple():
    """One-vertex fixture with genuinely coupled center dynamics:
    x' = x*y, y' = -y + x^2. The jet truncation error is visible in the
    center flow, so flow-consistency ratios are informative."""
    p1 = Poly(2, {(1, 1): 1})
    p2 = Poly(2, {(0, 1): -1, (2, 0): 1})
    return single_vertex_tuple([p1, p2])
