import io
import json

from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter


class ExcelRenderer:
    """Renderer Excel (XLSX): a results sheet and a configuration sheet."""

    def __init__(self, columns):
        self.columns = list(columns)

    def render(self, rows, config):
        """
        Generate an Excel workbook.

        Args:
            rows: Lists of already formatted values, in column order
            config: Resolved configuration, flattened onto the second sheet

        Returns:
            bytes: Excel content
        """
        wb = Workbook()
        ws = wb.active
        ws.title = "Results"

        # Styles
        header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        header_font = Font(color="FFFFFF", bold=True)
        section_fill = PatternFill(start_color="D9E1F2", end_color="D9E1F2", fill_type="solid")
        section_font = Font(bold=True)

        for col_num, header in enumerate(self.columns, 1):
            cell = ws.cell(row=1, column=col_num)
            cell.value = header
            cell.fill = header_fill
            cell.font = header_font
            cell.alignment = Alignment(horizontal="center", vertical="center")

        for row_num, row in enumerate(rows, 2):
            for col_num, value in enumerate(row, 1):
                if isinstance(value, (list, dict)):
                    value = json.dumps(value)
                ws.cell(row=row_num, column=col_num, value=value)

        for col_num in range(1, len(self.columns) + 1):
            ws.column_dimensions[get_column_letter(col_num)].width = 18

        sheet = wb.create_sheet("Configuration")
        sheet.cell(row=1, column=1, value="Key").font = section_font
        sheet.cell(row=1, column=2, value="Value").font = section_font
        for col_num in (1, 2):
            sheet.cell(row=1, column=col_num).fill = section_fill
        for row_num, (key, value) in enumerate(sorted(flatten_config(config).items()), 2):
            sheet.cell(row=row_num, column=1, value=key)
            sheet.cell(row=row_num, column=2, value=value)
        sheet.column_dimensions["A"].width = 36
        sheet.column_dimensions["B"].width = 24

        output = io.BytesIO()
        wb.save(output)
        output.seek(0)

        return output.getvalue()


def flatten_config(config, prefix=""):
    """Dotted keys of a nested mapping; lists are stored as JSON text."""
    flat = {}
    for key, value in config.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_config(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat
