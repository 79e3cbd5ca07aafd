import csv
import io


class CSVRenderer:
    """Renderer CSV for result tables."""

    def __init__(self, columns):
        self.columns = list(columns)

    def render(self, rows):
        """
        Generate a CSV document.

        Args:
            rows: Lists of already formatted values, in column order

        Returns:
            bytes: CSV content, header first; an empty row list gives a header-only file
        """
        output = io.StringIO()
        writer = csv.writer(output, delimiter=",", quotechar='"', lineterminator="\n")

        writer.writerow(self.columns)
        for row in rows:
            writer.writerow(["" if value is None else value for value in row])

        return output.getvalue().encode("utf-8")
