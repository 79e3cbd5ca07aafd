import html
from datetime import datetime, timezone

from weasyprint import HTML

STYLE = """
    @page {
        size: A4 landscape;
        margin: 1cm;
    }
    body {
        font-family: 'DejaVu Sans', Arial, sans-serif;
        font-size: 10pt;
        color: #333;
    }
    h1 {
        text-align: center;
        color: #366092;
        font-size: 18pt;
        margin-bottom: 5px;
    }
    h2 {
        color: #366092;
        font-size: 13pt;
    }
    .header-info {
        text-align: center;
        margin-bottom: 20px;
        font-size: 9pt;
        color: #666;
    }
    table {
        width: 100%;
        border-collapse: collapse;
        margin-bottom: 20px;
        font-size: 8pt;
    }
    table.data-table th {
        background-color: #366092;
        color: white;
        padding: 6px 4px;
        text-align: left;
        border: 1px solid #ddd;
    }
    table.data-table td {
        padding: 4px;
        border: 1px solid #ddd;
        font-family: 'Courier New', monospace;
    }
    table.data-table tr:nth-child(even) {
        background-color: #f9f9f9;
    }
    .config-box {
        background-color: #D9E1F2;
        padding: 15px;
        border-radius: 5px;
        margin-bottom: 15px;
        font-size: 8pt;
    }
    .figure {
        text-align: center;
        margin: 10px 0;
    }
    .figure svg {
        max-width: 100%;
        height: auto;
    }
    .footer {
        margin-top: 30px;
        text-align: center;
        font-size: 8pt;
        color: #999;
    }
"""


class PDFRenderer:
    """Renderer PDF for the run report of a subcommand."""

    # Tables longer than this are cut in the report; the result files hold every row
    MAX_ROWS = 200

    def __init__(self, title):
        self.title = title

    def render(self, sections, config, figures=()):
        """
        Generate a PDF report.

        Args:
            sections: (heading, columns, rows) triples
            config: Flat mapping of the resolved configuration
            figures: SVG documents (bytes) embedded after the tables

        Returns:
            bytes: PDF content
        """
        html_content = self._render_html(sections, config, figures)
        return HTML(string=html_content).write_pdf()

    def _render_html(self, sections, config, figures):
        """Build the HTML of the report."""
        generated = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M UTC")
        parts = [
            "<!DOCTYPE html>",
            '<html lang="en">',
            "<head>",
            '<meta charset="UTF-8">',
            f"<title>{html.escape(self.title)}</title>",
            f"<style>{STYLE}</style>",
            "</head>",
            "<body>",
            f"<h1>{html.escape(self.title)}</h1>",
            f'<div class="header-info">Generated: {generated}</div>',
        ]

        for heading, columns, rows in sections:
            parts.append(f"<h2>{html.escape(heading)}</h2>")
            parts.append('<table class="data-table"><thead><tr>')
            parts.extend(f"<th>{html.escape(str(c))}</th>" for c in columns)
            parts.append("</tr></thead><tbody>")
            for row in rows[: self.MAX_ROWS]:
                cells = "".join(f"<td>{html.escape(_cell(v))}</td>" for v in row)
                parts.append(f"<tr>{cells}</tr>")
            parts.append("</tbody></table>")
            if len(rows) > self.MAX_ROWS:
                parts.append(f"<p>{len(rows) - self.MAX_ROWS} more rows in the result file.</p>")

        for svg in figures:
            text = svg.decode("utf-8") if isinstance(svg, bytes) else svg
            # Drop the XML prolog and doctype; the <svg> element is inlined
            start = text.find("<svg")
            parts.append(f'<div class="figure">{text[start:]}</div>')

        parts.append('<h2>Configuration</h2><div class="config-box"><table>')
        for key, value in sorted(config.items()):
            parts.append(
                f"<tr><td>{html.escape(str(key))}</td><td>{html.escape(_cell(value))}</td></tr>"
            )
        parts.append("</table></div>")
        parts.append('<div class="footer">Report generated by sixghz-coexistence</div>')
        parts.append("</body></html>")
        return "\n".join(parts)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
