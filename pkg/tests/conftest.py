import sympy
from hypothesis import strategies as st

from kleintorelli.forms import Form


def to_sympy(form, symbols=None):
    """Independent polynomial representation used as an oracle."""
    if form is None:
        return sympy.Integer(0)
    xs = symbols or sympy.symbols(f"x0:{form.num_vars}")
    expr = sympy.Integer(0)
    for mono, coeff in form.terms:
        term = sympy.Integer(coeff)
        for x, a in zip(xs, mono):
            term *= x**a
        expr += term
    return sympy.expand(expr)


def exponent_vectors(num_vars, degree):
    """Strategy for one exponent vector of the given total degree."""

    @st.composite
    def build(draw):
        cuts = sorted(draw(st.lists(st.integers(0, degree), min_size=num_vars - 1, max_size=num_vars - 1)))
        bounds = [0] + cuts + [degree]
        return tuple(bounds[i + 1] - bounds[i] for i in range(num_vars))

    return build()


@st.composite
def forms(draw, min_vars=2, max_vars=5, min_degree=1, max_degree=5, max_terms=6, coeff_bound=9):
    num_vars = draw(st.integers(min_vars, max_vars))
    degree = draw(st.integers(min_degree, max_degree))
    monos = draw(st.lists(exponent_vectors(num_vars, degree), min_size=1, max_size=max_terms, unique=True))
    coeffs = draw(
        st.lists(
            st.integers(-coeff_bound, coeff_bound).filter(bool),
            min_size=len(monos),
            max_size=len(monos),
        )
    )
    return Form.from_terms(num_vars, list(zip(monos, coeffs)))


def int_matrices(size, bound=3):
    return st.lists(
        st.lists(st.integers(-bound, bound), min_size=size, max_size=size),
        min_size=size,
        max_size=size,
    )


# ------------------------------------------------ acceptance summary lines

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
