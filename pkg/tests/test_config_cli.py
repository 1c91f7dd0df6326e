import json
from fractions import Fraction

import pytest

from compactsub import builtins
from compactsub.alphabet import Angle, Circle, Cyclic, ExtNat, INF, Product
from compactsub.cli import main
from compactsub.config import ConfigError, parse_config
from compactsub.substitution import Constant, ConstantLengthGroup, NonConstantTable, Spin, Translation

RHO1_CFG = """\
# four columns on the circle
[alphabet]
kind = circle
phi = 0.618033988749895

[rule]
translation 0
translation 0
translation phi
translation 0
"""


def test_parse_circle_rule():
    p = parse_config(RHO1_CFG)
    assert p.rule == builtins.rho1()
    assert p.ctx.phi == pytest.approx(0.618033988749895) and p.ctx.exact is None


def test_parse_rational_phi_and_constant():
    p = parse_config("[alphabet]\nkind = circle\nphi = 1/3\nphi_kind = rational\n"
                     "[rule]\ntranslation 0\nconstant 1/2\ntranslation phi\n")
    assert p.ctx.exact == Fraction(1, 3)
    assert p.rule.columns[1] == Constant(Circle(Angle(Fraction(1, 2))))


def test_parse_cyclic_and_product():
    p = parse_config("[alphabet]\nkind = cyclic\nmodulus = 5\n[rule]\ntranslation 1\ntranslation 3\n")
    assert p.rule.columns == (Translation(Cyclic(5, 1)), Translation(Cyclic(5, 3)))
    p = parse_config("[alphabet]\nkind = product\nfactors = cyclic 2, circle\n"
                     "[rule]\ntranslation (1, 1/2+phi)\ntranslation (0, 0)\ntranslation (1, 0)\n")
    assert p.rule.columns[0].letter == Product((Cyclic(2, 1), Circle(Angle(Fraction(1, 2), 1))))


def test_parse_spin_and_builtin():
    p = parse_config("[rule]\nspin 2\nrow 0 1/2\nrow phi phi\n")
    assert isinstance(p.rule, Spin) and p.rule.W == builtins.spin().W
    assert isinstance(parse_config("[rule]\nbuiltin extnat-example\n").rule, NonConstantTable)
    assert parse_config("[rule]\nbuiltin cyclic(4)\n").rule == builtins.cyclic(4)


@pytest.mark.parametrize("text,line,column", [
    ("[alphabet]\nkind = torus\n[rule]\ntranslation 0\n", 2, 8),
    ("[alphabet]\nkind = circle\n[rule]\ntranslation 0\ntranslation 1/0\n", 5, 13),
    ("[alphabet]\nkind = circle\n[rule]\nshift 0\n", 4, 1),
    ("[rule]\nspin 2\nrow 0 1/2 0\n", 3, 5),
    ("[alphabet]\ncolour = red\n", 2, 1),
    ("kind = circle\n", 1, 1),
    ("[alphabet]\nkind = cyclic\nmodulus = x\n[rule]\ntranslation 0\n", 3, 11),
    ("[alphabet]\nkind = circle\nphi = abc\n[rule]\ntranslation 0\n", 3, 7),
])
def test_errors_carry_position(text, line, column):
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    assert (e.value.line, e.value.column) == (line, column)
    assert str(e.value).startswith(f"line {line}, column {column}:")


def test_unknown_builtin():
    with pytest.raises(ConfigError):
        parse_config("[rule]\nbuiltin nope\n")


# === CLI ===

SHOW = {
    "rho1": "[θ] ↦ [θ][θ][θα][θ]",
    "rho2": "[θ] ↦ [θ][1][θα][θ]",
    "spin": "(θ,0) ↦ (θ,0)(−θ,1)\n(θ,1) ↦ (θα,0)(θα,1)",
    "cyclic(3)": "[a] ↦ [a][ag][ag²][a]",
    "c2xs1": "[(a,θ)] ↦ [(a,θ)][(ag,θα)][(a,θ)]",
}


@pytest.mark.parametrize("name", sorted(SHOW))
def test_show_rule_verbatim(name, capsys):
    assert main(["orbit", "--builtin", name, "--show-rule"]) == 0
    assert capsys.readouterr().out == SHOW[name] + "\n"


def test_show_rule_matches_formatter(capsys):
    for name in ("extnat",):
        main(["orbit", "--builtin", name, "--show-rule"])
        assert capsys.readouterr().out == builtins.format_rule(builtins.builtin(name)) + "\n"


def test_orbit_csv_deterministic(capsys):
    main(["orbit", "--builtin", "rho1", "--radius", "5"])
    first = capsys.readouterr().out
    main(["orbit", "--builtin", "rho1", "--radius", "5"])
    assert capsys.readouterr().out == first
    rows = first.splitlines()
    assert rows[0] == "coord,letter" and len(rows) == 12 and rows[1].startswith("-5,")


def test_classify_json(capsys, tmp_path):
    cfg = tmp_path / "rho1.cfg"
    cfg.write_text(RHO1_CFG, encoding="utf-8")
    assert main(["classify", "--config", str(cfg)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["kind"] == "PurelySingularContinuous"
    assert main(["classify", "--builtin", "rho1", "--phi", "1/3", "--rational", "--chi", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "PurePoint"
    assert main(["classify", "--builtin", "spin", "--chi", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "Lebesgue"


def test_exit_codes(capsys, tmp_path):
    assert main(["classify", "--builtin", "extnat"]) == 1
    assert "hypothesis violated" in capsys.readouterr().err
    bad = tmp_path / "bad.cfg"
    bad.write_text("[alphabet]\nkind = circle\n[rule]\ntranslation 0\ntranslation 1/0\n")
    assert main(["classify", "--config", str(bad)]) == 2
    assert "line 5, column 13" in capsys.readouterr().err
    assert main(["classify", "--builtin", "nosuch"]) == 2


def test_eta_and_spectrum_commands(capsys, tmp_path):
    assert main(["eta", "--builtin", "rho1", "--exact", "--max-lag", "4"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "m,re,im,abs" and len(rows) == 10
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--builtin", "cyclic(3)", "--kernel-order", "64", "--grid", "128",
                 "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 129


def test_riesz_and_geometry_commands(capsys):
    assert main(["riesz", "--angle", "2phi", "--riesz-depth", "4", "--grid", "16"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 17
    assert main(["geometry", "eig", "--cap", "20"]) == 0
    assert json.loads(capsys.readouterr().out)["lambda"] == pytest.approx(2.5)
    assert main(["geometry", "freq", "--depth", "9", "--report-cap", "4"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert sorted(rec["frequencies"]) == ["0", "1", "2", "3", "4"]


def test_delone_command(capsys, tmp_path):
    pts = tmp_path / "p.csv"
    assert main(["delone", "--iters", "3", "--audit", "--points", str(pts)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["audit"]["inflation_ok"] and rec["audit"]["min_gap"]["decimal"] == 1.0
    assert pts.read_text().splitlines()[0] == "num,exp,decimal,label"


def test_letters_in_configs_roundtrip():
    p = parse_config("[alphabet]\nkind = extnat\n[rule]\nbuiltin extnat\n")
    assert isinstance(p.rule, NonConstantTable)
    assert p.rule.image(ExtNat(0))[0] == ExtNat(0) and INF in p.rule.image(INF)
    assert isinstance(parse_config(RHO1_CFG).rule, ConstantLengthGroup)
