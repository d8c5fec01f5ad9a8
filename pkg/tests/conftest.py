from hypothesis import strategies as st

from ntilde.core import Add, Const, E, Mul, One, Var

NAMES = st.sampled_from(["x", "y", "z", "x1", "_t", "$0", "$12"])


def n_terms(max_leaves=8):
    leaves = st.one_of(st.integers(0, 10**30).map(Const), NAMES.map(Var))
    return st.recursive(
        leaves,
        lambda kids: st.one_of(st.builds(Add, kids, kids), st.builds(Mul, kids, kids)),
        max_leaves=max_leaves,
    )


def t_terms(max_leaves=8):
    leaves = st.one_of(st.just(One()), NAMES.map(Var))
    return st.recursive(
        leaves,
        lambda kids: st.one_of(st.builds(Add, kids, kids), st.builds(E, kids, kids)),
        max_leaves=max_leaves,
    )
