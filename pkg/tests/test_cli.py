"""End-to-end checks of the command-line interface and the formula grammar."""

import json

import pytest

from ranktwo.cli import main
from ranktwo.fixtures import load_fixture
from ranktwo.formula_text import FormulaSyntaxError, parse_formula
from ranktwo.logic import decide
from ranktwo.oracle import brute_appearance


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def popcount_parity(n):
    return bin(n).count("1") & 1


# ---------------------------------------------------------------- formulas


SENTENCES = [
    # (fixture, text, expected) -- expectations follow from the defining
    # rules of the fixtures (parity of ones, n mod 3, powers of two).
    ("thue-morse", "E i. x[i] = 1", True),
    ("thue-morse", "E i. x[i] = 2", False),
    ("thue-morse", "A i. x[i] = 0 | x[i] = 1", True),
    ("thue-morse", "A i. E j. j > i & x[j] = 0", True),
    ("thue-morse", "A i. x[2*i] != x[2*i+1]", True),
    ("thue-morse", "E i. i > 0 & (A j. x[i+j] = x[j])", False),
    ("thue-morse", "E i. x[i] = 0 & x[i+1] = 0 & x[i+2] = 0", False),
    ("mod3", "E i. i > 0 & (A j. x[i+j] = x[j])", True),
    ("mod3", "A i. x[i+3] = x[i]", True),
    ("mod3", "A i. x[i+2] = x[i]", False),
    ("mod3", "A i. x[i] = 0 -> x[i+1] = 1", True),
    ("pow2-char", "E i. x[i] = 1 & x[2*i] = 1", True),
    ("pow2-char", "E i. i > 4 & x[i] = 1 & x[i+1] = 1", False),
]


def test_parsed_sentences_decide_correctly():
    for fixture, text, expected in SENTENCES:
        seq = load_fixture(fixture)
        assert decide(parse_formula(text), seq=seq) is expected, (fixture, text)


def test_formula_precedence_and_associativity():
    tm = load_fixture("thue-morse")
    # negation binds tighter than a connective: (~ x[0]=1) | x[1]=0
    assert decide(parse_formula("~ x[0] = 1 | x[1] = 0"), seq=tm) is True
    assert decide(parse_formula("~ (x[0] = 0 | x[1] = 1)"), seq=tm) is False
    # implication associates to the right: F -> (T -> F) is true
    assert decide(parse_formula("x[0] = 1 -> x[0] = 0 -> x[0] = 1"), seq=tm) is True
    # and binds tighter than or: T | (F & F)
    assert decide(parse_formula("x[1] = 1 | x[0] = 1 & x[2] = 0"), seq=tm) is True
    # bang is an alternative negation spelling
    assert decide(parse_formula("! x[0] = 1"), seq=tm) is True
    # primed variable names are allowed
    assert decide(parse_formula("E i'. x[i'] = 1"), seq=tm) is True


BAD_FORMULAS = [
    ("", 0),
    ("E", 1),
    ("E i", 3),
    ("E i.", 4),
    ("E i j. x[i] = 0", 4),
    ("x[", 2),
    ("x 0", 2),
    ("x[0] < 1", 5),
    ("x = 1", 2),
    ("(x[0] = 0", 9),
    ("x[0] = 0)", 8),
    ("$", 0),
]


def test_formula_syntax_errors_carry_positions():
    for text, pos in BAD_FORMULAS:
        with pytest.raises(FormulaSyntaxError) as info:
            parse_formula(text)
        assert info.value.pos == pos, text
        assert f"column {pos + 1}:" in str(info.value)


# ---------------------------------------------------------------- plain commands


def morphic_ternary(n):
    # fixed point of 0 -> 01, 1 -> 20, 2 -> 20, starting from 0
    seq = [0]
    while len(seq) < n:
        seq = [b for a in seq for b in ((0, 1), (2, 0), (2, 0))[a]]
    return seq[:n]


GENERATORS = {
    "thue-morse": lambda n: [popcount_parity(i) for i in range(n)],
    "mod3": lambda n: [i % 3 for i in range(n)],
    "pow2-char": lambda n: [1 if i >= 1 and i & (i - 1) == 0 else 0 for i in range(n)],
    "ternary-tm": morphic_ternary,
}


def test_eval_range_matches_independent_generators(capsys):
    for fixture, generator in GENERATORS.items():
        code, out, _ = run(capsys, ["eval", "--fixture", fixture, "--n", "0..4096"])
        assert code == 0
        values = [int(tok) for tok in out.split()]
        assert values == generator(4096), fixture


def test_eval_single_position_and_json(capsys):
    code, out, _ = run(capsys, ["eval", "--fixture", "mod3", "--n", "5"])
    assert code == 0 and out.strip() == "2"
    code, out, _ = run(
        capsys, ["eval", "--fixture", "mod3", "--n", "3..6", "--format", "json"]
    )
    assert code == 0
    assert json.loads(out) == {"start": 3, "stop": 6, "values": [0, 1, 2]}


def test_analyze_json_reports_consistent_constants(capsys):
    code, out, _ = run(capsys, ["analyze", "--fixture", "thue-morse", "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert data["C"] == 4096
    assert data["kappa"] == data["C"] + 1
    assert data["B"] == 2 ** data["power_states"] * data["C"]
    assert data["p"] == data["B"]


def test_factors_command(capsys):
    code, out, _ = run(capsys, ["factors", "--fixture", "thue-morse"])
    assert code == 0 and out.strip() == "none"
    code, out, _ = run(capsys, ["factors", "--fixture", "pow2-char", "--format", "json"])
    assert code == 0
    words = [f["word"] for f in json.loads(out)["factors"]]
    assert [0] in words


def test_max_exponent_command(capsys):
    for word_arg, expected in [("0", "2"), ("00", "1"), ("3", "not-a-factor")]:
        code, out, _ = run(
            capsys, ["max-exponent", "--fixture", "thue-morse", "--word", word_arg]
        )
        assert code == 0 and out.strip() == expected
    code, out, _ = run(capsys, ["max-exponent", "--fixture", "pow2-char", "--word", "0"])
    assert code == 0 and out.strip() == "unbounded"
    code, out, _ = run(
        capsys,
        ["max-exponent", "--fixture", "thue-morse", "--word", "010", "--format", "json"],
    )
    data = json.loads(out)
    assert data["kind"] == "fraction" and data["word"] == [0, 1, 0]
    assert data["numerator"] * 3 >= data["denominator"]  # exponent >= 1


def test_periodic_command(capsys, tmp_path):
    code, out, _ = run(capsys, ["periodic", "--fixture", "mod3"])
    assert code == 0 and out.strip() == "purely periodic, period 3"
    code, out, _ = run(capsys, ["periodic", "--fixture", "thue-morse"])
    assert code == 0 and out.strip() == "aperiodic"
    path = tmp_path / "one_then_zeros.dfao"
    path.write_text(
        "k 2\nalphabet 0 1\nstates 2\ninitial 0\n"
        "output 0 1\noutput 1 0\n"
        "trans 0 0 0\ntrans 0 1 1\ntrans 1 0 1\ntrans 1 1 1\n"
    )
    code, out, _ = run(capsys, ["periodic", "--dfao", str(path), "--format", "json"])
    assert code == 0
    assert json.loads(out) == {"kind": "ultimately-periodic", "preperiod": 1, "period": 1}


# ---------------------------------------------------------------- rank2


def test_rank2_mod3(capsys):
    code, out, _ = run(capsys, ["rank2", "--fixture", "mod3"])
    assert code == 0
    assert "rank one, period 3" in out
    assert "UNSOUND" not in out


def test_rank2_ternary_pair_certificate(capsys):
    code, out, _ = run(capsys, ["rank2", "--fixture", "ternary-tm"])
    assert code == 0
    assert "u=01 v=20" in out
    assert "16386" in out


def test_rank2_json_shape_and_determinism(capsys):
    code, first, _ = run(capsys, ["rank2", "--fixture", "thue-morse", "--format", "json"])
    assert code == 0
    code, second, _ = run(capsys, ["rank2", "--fixture", "thue-morse", "--format", "json"])
    assert first == second
    data = json.loads(first)
    assert data["verdict"] == "rank_two"
    assert data["certificate"]["kind"] == "explicit_pair"
    assert data["certificate"]["validated_prefix"] >= 2 ** 14
    assert data["soundness_flags"]["unsound"] is False


def test_rank2_assume_hook_taints_any_verdict(capsys):
    # the verdict below comes from the periodicity stage, which never uses
    # the assumed constant -- the run is still marked unsound as a whole
    code, out, _ = run(
        capsys, ["rank2", "--fixture", "mod3", "--assume-D", "4", "--format", "json"]
    )
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "rank_one"
    assert data["soundness_flags"]["unsound"] is True
    code, out, _ = run(capsys, ["rank2", "--fixture", "mod3", "--assume-D", "4"])
    assert code == 0
    assert "UNSOUND-FOR-PRODUCTION" in out


def test_rank2_pattern_budget_breach_is_a_verdict(capsys):
    code, out, _ = run(
        capsys,
        [
            "rank2",
            "--fixture",
            "ternary-tm",
            "--budget-patterns",
            "0",
            "--disable-fast-paths",
            "--format",
            "json",
        ],
    )
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "inconclusive"
    assert data["stage"] == "Step5"
    assert "2^" in data["required"]


# ---------------------------------------------------------------- decide


def test_decide_command_truth_values(capsys):
    code, out, _ = run(
        capsys, ["decide", "--fixture", "thue-morse", "A i. E j. j > i & x[j] = 1"]
    )
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(capsys, ["decide", "--fixture", "thue-morse", "E i. x[i] = 2"])
    assert code == 0 and out.strip() == "false"
    code, out, _ = run(
        capsys,
        ["decide", "--fixture", "mod3", "A i. x[i] = x[i+3]", "--format", "json"],
    )
    assert code == 0
    assert json.loads(out)["value"] is True


def test_decide_command_rejects_bad_input(capsys):
    code, _, err = run(capsys, ["decide", "--fixture", "thue-morse", "E i. x[i] <"])
    assert code == 2 and "column" in err
    # free variables do not make a sentence
    code, _, err = run(capsys, ["decide", "--fixture", "thue-morse", "x[i] = 0"])
    assert code == 2 and "free variable" in err


# ---------------------------------------------------------------- oracle


def test_oracle_dp(capsys):
    code, out, _ = run(
        capsys,
        [
            "oracle", "dp", "--fixture", "ternary-tm",
            "--u", "01", "--v", "20", "--prefix-len", "64", "--format", "json",
        ],
    )
    assert code == 0
    cuts = json.loads(out)["cuts"]
    assert cuts[0] == 0 and cuts[-1] == 64
    assert all(b - a == 2 for a, b in zip(cuts, cuts[1:]))
    code, out, _ = run(
        capsys,
        ["oracle", "dp", "--fixture", "ternary-tm", "--u", "01", "--v", "21",
         "--prefix-len", "64"],
    )
    assert code == 0 and out.strip() == "none"


def test_oracle_pairs(capsys):
    code, out, _ = run(
        capsys,
        ["oracle", "pairs", "--fixture", "ternary-tm", "--max-total", "4",
         "--prefix-len", "512", "--format", "json"],
    )
    assert code == 0
    assert [[0, 1], [2, 0]] in json.loads(out)["pairs"]


def test_oracle_appearance(capsys):
    code, out, _ = run(
        capsys,
        ["oracle", "appearance", "--fixture", "thue-morse", "--n", "3",
         "--prefix-len", "4096"],
    )
    assert code == 0
    prefix = tuple(load_fixture("thue-morse").prefix(4096))
    assert int(out.strip()) == brute_appearance(prefix, 3)


def test_oracle_searches_small_bounds(capsys):
    code, out, _ = run(
        capsys, ["oracle", "comb-search", "--max-pair-total", "2", "--max-w-len", "4"]
    )
    assert code == 0 and out.strip() == "none"
    code, out, _ = run(
        capsys,
        ["oracle", "depsilon-search", "--max-pair-total", "3", "--max-w-len", "4",
         "--format", "json"],
    )
    assert code == 0 and json.loads(out)["witness"] is None


# ---------------------------------------------------------------- error handling


def test_malformed_dfao_reports_line(capsys, tmp_path):
    path = tmp_path / "bad.dfao"
    path.write_text("k 2\nalphabet 0 1\nstates 1\ninitial 0\noutput 0 0\ntrans 0 0 oops\n")
    code, _, err = run(capsys, ["periodic", "--dfao", str(path)])
    assert code == 2
    assert "line 6" in err


def test_missing_dfao_file(capsys):
    code, _, err = run(capsys, ["eval", "--dfao", "/nonexistent/x.dfao", "--n", "0"])
    assert code == 2 and "cannot read" in err


def test_unknown_fixture_is_an_argparse_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "--fixture", "bogus", "--n", "0"])
    assert info.value.code == 2


def test_bad_word_and_position_arguments(capsys):
    code, _, err = run(capsys, ["max-exponent", "--fixture", "thue-morse", "--word", "ab"])
    assert code == 2 and "digit strings" in err
    code, _, err = run(capsys, ["eval", "--fixture", "thue-morse", "--n", "abc"])
    assert code == 2 and "positions" in err
    code, _, err = run(capsys, ["eval", "--fixture", "thue-morse", "--n", "9..3"])
    assert code == 2
    code, _, err = run(
        capsys, ["oracle", "comb-search", "--max-pair-total", "2", "--alphabet", "0"]
    )
    assert code == 2 and "two distinct letters" in err
