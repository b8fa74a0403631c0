import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detlam.scott import (
    BLANK, Alphabet, DecodeError, decode_char, decode_string, encode_char, encode_string,
    encode_tuple, mk_append, mk_flat, mk_lift, mk_theta, same_string,
)
from detlam.syntax import parse
from detlam.terms import App, Status, Var, alpha_equivalent, evaluate, validate_det
from oracles import APPEND, flat_steps, lift_steps
from strategies import alphabets

AB = Alphabet(("a", "b"))
AB_BOX = AB.with_blank()
K = Var("k")


def run_cps(f, arg, fuel=100_000):
    r = evaluate(App(App(f, K), arg), fuel)
    assert r.status is Status.NORMAL_FORM
    assert isinstance(r.final, App) and r.final.fun is K
    return r.final.arg, r.steps


# --- alphabets -------------------------------------------------------------------

def test_alphabet_order_and_blank():
    assert AB.index("a") == 1 and AB.index("b") == 2
    assert AB_BOX.symbols == ("a", "b", BLANK)
    assert AB_BOX.without_blank() == AB
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError):
        Alphabet(("a", BLANK))
    with pytest.raises(ValueError):
        Alphabet((BLANK, "a"), True)
    with pytest.raises(ValueError):
        AB_BOX.with_blank()
    with pytest.raises(ValueError):
        AB.check("abc")


# --- characters and strings ----------------------------------------------------------

def test_encode_char_examples():
    assert encode_char(AB, "a") is parse(r"\x1 x2. x1")
    assert encode_char(AB, "b") is parse(r"\x1 x2. x2")
    assert encode_char(AB_BOX, BLANK) is parse(r"\x1 x2 x3. x3")
    with pytest.raises(ValueError):
        encode_char(AB, "c")


def test_encode_string_examples():
    empty = parse(r"\x1 x2 y. y")
    assert encode_string(AB, "") is empty
    assert encode_string(AB, "a") is parse(r"\x1 x2 y. x1 (\x1 x2 y. y)")
    assert encode_string(AB, "ba") is parse(r"\x1 x2 y. x2 (\x1 x2 y. x1 (\x1 x2 y. y))")
    with pytest.raises(ValueError):
        encode_string(AB, "abc")


def test_decode_examples():
    assert decode_string(AB, encode_string(AB, "ab")) == ("a", "b")
    assert decode_string(AB, parse(r"\x1 x2 y. y")) == ()
    with pytest.raises(DecodeError):
        decode_string(AB, parse(r"\z. z"))
    assert decode_char(AB, parse(r"\p q. q")) == "b"


def test_decode_is_alpha_aware():
    renamed = parse(r"\p q r. q (\u v w. w)")
    assert decode_string(AB, renamed) == ("b",)


@pytest.mark.parametrize("text", [
    r"\x1 x2 y. z",                        # free selector
    r"\x1 x2 y. x1 x2",                    # tail is not a string
    r"\x1 x2 y. x1 (\x1' x2' y'. x1)",     # tail refers to an outer binder
    r"\x1 x2. x1",                         # a character, not a string
    r"\x1 x2 y. y y",
])
def test_decode_rejects_malformed(text):
    with pytest.raises(DecodeError) as info:
        decode_string(AB, parse(text))
    assert isinstance(info.value.path, tuple)


def test_decode_error_path_points_into_term():
    bad = parse(r"\x1 x2 y. x1 (\x1 x2 y. x2 (\z. z))")
    with pytest.raises(DecodeError) as info:
        decode_string(AB, bad)
    assert len(info.value.path) > 4


def test_order_sensitivity():
    assert not alpha_equivalent(encode_char(Alphabet(("a", "b")), "a"), encode_char(Alphabet(("b", "a")), "a"))


@given(st.data())
@settings(max_examples=300)
def test_round_trip(data):
    alphabet = Alphabet(data.draw(alphabets()))
    s = tuple(data.draw(st.lists(st.sampled_from(alphabet.symbols), max_size=12)))
    t = encode_string(alphabet, s)
    assert decode_string(alphabet, t) == s
    assert same_string(alphabet, t, s)
    assert not t.fv and validate_det(t)


# --- tuples -------------------------------------------------------------------------

def test_encode_tuple_examples():
    i = parse(r"\y. y")
    assert alpha_equivalent(encode_tuple([i]), parse(r"\x. x (\y. y)"))
    vs = [parse(rf"\v. v{n}") for n in range(4)]
    assert alpha_equivalent(encode_tuple(vs), parse(r"\x. x (\v. v0) (\v. v1) (\v. v2) (\v. v3)"))
    assert alpha_equivalent(encode_tuple([]), parse(r"\x. x"))
    with pytest.raises(ValueError):
        encode_tuple([parse("f g")])


def test_tuple_binder_avoids_capture():
    t = encode_tuple([Var("t"), Var("u")])
    assert t.fv == frozenset({"t", "u"})
    assert alpha_equivalent(t, parse(r"\sel. sel t u"))


# --- theta -------------------------------------------------------------------------------

def test_theta_is_closed_and_deterministic():
    theta = mk_theta()
    assert not theta.fv and validate_det(theta)


# --- append -----------------------------------------------------------------------------

def test_append_examples():
    out, n = run_cps(mk_append(AB, "a"), encode_string(AB, ""))
    assert out is encode_string(AB, "a") and n == APPEND
    out, n = run_cps(mk_append(AB, "b"), encode_string(AB, "a"))
    assert out is encode_string(AB, "ba") and n == APPEND
    with pytest.raises(ValueError):
        mk_append(AB, "c")


@given(st.data())
@settings(max_examples=200)
def test_append_semantics(data):
    alphabet = Alphabet(data.draw(alphabets()))
    a = data.draw(st.sampled_from(alphabet.symbols))
    s = tuple(data.draw(st.lists(st.sampled_from(alphabet.symbols), max_size=10)))
    out, n = run_cps(mk_append(alphabet, a), encode_string(alphabet, s))
    assert same_string(alphabet, out, (a,) + s)
    assert n == APPEND


@pytest.mark.parametrize("size", [1, 2, 3, 4])
def test_append_constant_across_lengths(size):
    alphabet = Alphabet(tuple("abcd"[:size]))
    for a in alphabet:
        counts = {run_cps(mk_append(alphabet, a), encode_string(alphabet, ("a",) * n))[1] for n in (0, 1, 5, 10)}
        assert counts == {APPEND}


# --- lift and flat ------------------------------------------------------------------------

def test_lift_examples():
    out, n = run_cps(mk_lift(AB), encode_string(AB, ""))
    assert out is encode_string(AB_BOX, "")
    assert n == lift_steps(2, 0)
    out, _ = run_cps(mk_lift(AB), encode_string(AB, "ab"))
    assert decode_string(AB_BOX, out) == ("a", "b")
    with pytest.raises(ValueError):
        mk_lift(AB_BOX)


def test_flat_examples():
    out, _ = run_cps(mk_flat(AB_BOX), encode_string(AB_BOX, ""))
    assert out is encode_string(AB, "")
    out, n = run_cps(mk_flat(AB_BOX), encode_string(AB_BOX, ("a", BLANK, "b")))
    assert decode_string(AB, out) == ("a", "b")
    assert n == flat_steps(3, 2, 1)
    with pytest.raises(ValueError):
        mk_flat(AB)


@given(st.data())
@settings(max_examples=150)
def test_lift_exact_counts(data):
    alphabet = Alphabet(data.draw(alphabets()))
    s = tuple(data.draw(st.lists(st.sampled_from(alphabet.symbols), max_size=8)))
    out, n = run_cps(mk_lift(alphabet), encode_string(alphabet, s))
    assert decode_string(alphabet.with_blank(), out) == s
    assert n == lift_steps(len(alphabet), len(s))


@given(st.data())
@settings(max_examples=150)
def test_flat_exact_counts(data):
    box = Alphabet(data.draw(alphabets())).with_blank()
    s = tuple(data.draw(st.lists(st.sampled_from(box.symbols), max_size=8)))
    out, n = run_cps(mk_flat(box), encode_string(box, s))
    kept = tuple(a for a in s if a != BLANK)
    assert decode_string(box.without_blank(), out) == kept
    assert n == flat_steps(len(box), len(kept), len(s) - len(kept))


@given(st.data())
@settings(max_examples=100)
def test_flat_after_lift_is_identity(data):
    alphabet = Alphabet(data.draw(alphabets()))
    s = tuple(data.draw(st.lists(st.sampled_from(alphabet.symbols), max_size=10)))
    lifted, _ = run_cps(mk_lift(alphabet), encode_string(alphabet, s))
    flat, _ = run_cps(mk_flat(alphabet.with_blank()), lifted)
    assert decode_string(alphabet, flat) == s


@pytest.mark.parametrize("size", [1, 2, 3, 4])
def test_constructors_are_closed_and_deterministic(size):
    alphabet = Alphabet(tuple("abcd"[:size]))
    box = alphabet.with_blank()
    terms = [mk_lift(alphabet), mk_flat(box)] + [mk_append(box, a) for a in box]
    terms += [encode_char(box, a) for a in box] + [encode_string(box, tuple(box))]
    for t in terms:
        assert not t.fv
        assert validate_det(t)
