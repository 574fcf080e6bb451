import numpy as np
import pytest

from nmslab.plotting import Curve, Panel, PlotStyle, emit_plot


def test_single_lorentzian():
    x = np.linspace(0.5, 1.5, 201)
    y = 1 / ((x**2 - 1) ** 2 + 0.01 * x**2)
    svg = emit_plot(Panel([Curve(x, y, "S_Q")], xlabel="omega/omega_m", ylabel="S_Q"))
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 1
    assert "omega/omega_m" in svg and ">S_Q<" in svg


def test_two_panels_three_curves_each():
    x = np.linspace(-0.9, 0.9, 19)
    panels = [Panel([Curve(x, x * k, f"c{k}") for k in range(3)], title=t) for t in ("Re", "Im")]
    svg = emit_plot(panels, PlotStyle(panel_height=200))
    assert svg.count('<g class="panel">') == 2
    assert svg.count("<polyline") == 6
    assert 'height="400"' in svg


def test_deterministic_output():
    x = np.linspace(0, 1, 50)
    p = Panel([Curve(x, np.sin(x), "a & <b>")])
    assert emit_plot(p) == emit_plot(p)
    assert "a &amp; &lt;b&gt;" in emit_plot(p)


@pytest.mark.parametrize("curves", [
    [],
    [Curve([], [], "empty")],
    [Curve([0, 1], [0, np.nan], "nan")],
    [Curve([0, 1], [0, np.inf], "inf")],
    [Curve([0, 1, 2], [0, 1], "mismatch")],
])
def test_invalid_series_rejected(curves):
    with pytest.raises(ValueError):
        emit_plot(Panel(curves))
    with pytest.raises(ValueError, match="empty series"):
        emit_plot([])


def test_constant_series_still_renders():
    svg = emit_plot(Panel([Curve([0, 1, 2], [3, 3, 3])]))
    assert "nan" not in svg.lower()
