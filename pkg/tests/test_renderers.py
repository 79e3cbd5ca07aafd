import io

import pytest
from openpyxl import load_workbook

from sixghz_coexistence.renderers.csv_renderer import CSVRenderer
from sixghz_coexistence.renderers.excel_renderer import ExcelRenderer, flatten_config
from sixghz_coexistence.renderers.plot_renderer import PlotRenderer


def _coverage_rows():
    rows = []
    for tier in ("cellular", "wifi"):
        for band in ("licensed", "unlicensed"):
            for gamma_db, value in ((-10.0, 0.9), (0.0, 0.6), (10.0, 0.2)):
                rows.append(
                    {
                        "gamma_db": gamma_db,
                        "tier": tier,
                        "band": band,
                        "analytic": value,
                        "p_hat": value + 0.01,
                        "ci99": 0.02,
                    }
                )
    return rows


class TestCSVRenderer:
    def test_header_only(self):
        assert CSVRenderer(["a", "b"]).render([]) == b"a,b\n"

    def test_quoting_and_missing(self):
        content = CSVRenderer(["name", "value"]).render([["x, y", None]])
        assert content == b'name,value\n"x, y",\n'


class TestExcelRenderer:
    def test_sheets(self):
        content = ExcelRenderer(["tier", "rate"]).render(
            [["cellular", 55.4], ["wifi", [1, 2]]], {"game": {"mu": 0.1}, "mode": "analytic"}
        )
        workbook = load_workbook(io.BytesIO(content))
        results = workbook["Results"]
        assert [c.value for c in results[1]] == ["tier", "rate"]
        assert results["B2"].value == 55.4
        assert results["B3"].value == "[1, 2]"
        config = workbook["Configuration"]
        assert [(r[0].value, r[1].value) for r in config.iter_rows(min_row=2)] == [
            ("game.mu", 0.1),
            ("mode", "analytic"),
        ]

    def test_flatten_config(self):
        flat = flatten_config({"a": {"b": 1, "c": {"d": "x"}}, "e": [1, 2]})
        assert flat == {"a.b": 1, "a.c.d": "x", "e": "[1, 2]"}


class TestPlotRenderer:
    def test_coverage_svg(self):
        svg = PlotRenderer().coverage(_coverage_rows())
        assert b"<svg" in svg

    def test_identical_input_identical_svg(self):
        assert PlotRenderer().coverage(_coverage_rows()) == PlotRenderer().coverage(
            _coverage_rows()
        )

    def test_trace_svg(self):
        records = [
            {"activation": step, "actor": step % 2, "delta_c_i": 0.1 * step, "delta_w_i": 0.5}
            for step in range(6)
        ]
        assert b"<svg" in PlotRenderer().trace(records, 2)


class TestPDFRenderer:
    def test_report(self):
        pytest.importorskip("weasyprint")
        from sixghz_coexistence.renderers.pdf_renderer import PDFRenderer

        content = PDFRenderer("coverage").render(
            [("results", ["gamma_db", "p_hat"], [[0.0, 0.5], [10.0, None]])],
            {"mode": "analytic"},
            [PlotRenderer().coverage(_coverage_rows())],
        )
        assert content.startswith(b"%PDF")

    def test_long_tables_are_cut(self):
        pytest.importorskip("weasyprint")
        from sixghz_coexistence.renderers.pdf_renderer import PDFRenderer

        renderer = PDFRenderer("game")
        rows = [[i] for i in range(PDFRenderer.MAX_ROWS + 5)]
        html = renderer._render_html([("trace", ["activation"], rows)], {}, [])
        assert "5 more rows in the result file." in html
