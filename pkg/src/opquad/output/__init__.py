"""Console rendering and file persistence."""
from .formatter import print_row, print_report, render_report, render_rule, render_matrix, save_text
