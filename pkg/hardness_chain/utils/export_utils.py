"""
Export utilities for hardness-chain

Writes DIMACS, versioned YAML documents, .2ssilp text, the human audit
summary and corpus CSV tables. Nothing written here contains timestamps or
host data, so identical runs produce identical bytes.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Union

import pandas as pd
from jinja2 import Environment

from ..core.qc_reduction import AuditReport, UniquenessReport
from ..core.sat import Formula, write_dimacs
from ..core.stoch_ilp import TwoStageILP, write_2ssilp
from .documents import Document, dump_document

AUDIT_SUMMARY_TEMPLATE = """\
Reduction audit: {{ 'PASSED' if report.passed else 'FAILED' }}
{% if title %}Input: {{ title }}
{% endif %}
Structural checks
{% for name, ok in report.checks.items() %}  [{{ 'PASS' if ok else 'FAIL' }}] {{ name }}
{% endfor %}
Size claims
{% set v = report.values %}
  QC primes in O((l+m)^2): {{ v.num_primes }} primes (expected {{ v.expected_num_primes }}), l+m = {{ v.size_parameter }}, ratio {{ v.primes_per_size_squared }}
  alpha, beta, gamma in 4^O((l+m)^2): {{ v.alpha_bits }} / {{ v.beta_bits }} / {{ v.gamma_bits }} bits, beta bits per (l+m)^2 = {{ v.beta_bits_per_size_squared }}
  H and K: {{ v.H_bits }} and {{ v.K_bits }} bits, largest theta {{ v.theta_max_bits }} bits
  grid threshold: least admissible grid prime {{ v.grid_threshold }}, claimed constant {{ v.claimed_grid_threshold }} ({{ 'within' if v.grid_threshold_within_claim else 'exceeds' }})
  largest prime of beta: {{ v.max_prime }}, ratio to (l+m)^2 log(l+m) = {{ v.max_prime_per_size_bound }}
  p*: {{ v.p_star }} (rank {{ v.p_star_rank }} prime is {{ v.p_star_rank_prime }}{{ ', shifted above the grid' if v.p_star_shifted else '' }})
{% if uniqueness %}
Uniqueness of the signed theta sums
  values: {{ uniqueness.values }}, distinct: {{ uniqueness.distinct }}, congruent: {{ uniqueness.all_congruent }}, bounded: {{ uniqueness.all_bounded }}
  random probes: {{ uniqueness.probes }}, violations: {{ uniqueness.probe_violations }}
{% endif %}"""


class ExportManager:
    """Manager for writing every output format"""

    def __init__(self, settings=None):
        self.settings = settings
        self.logger = logging.getLogger(__name__)
        self._templates = Environment(
            trim_blocks=True,
            keep_trailing_newline=True,
            autoescape=False,
        )

        # Supported export formats
        self.supported_formats: Dict[str, Callable[..., str]] = {
            "cnf": self._render_cnf,
            "document": self._render_document,
            "2ssilp": self._render_2ssilp,
            "summary": self._render_summary,
            "csv": self._render_csv,
        }

    def render(self, payload: Any, format_type: str, **options: Any) -> str:
        if format_type not in self.supported_formats:
            raise ValueError(
                f"Unsupported format: {format_type}. Supported: {list(self.supported_formats.keys())}"
            )
        return self.supported_formats[format_type](payload, **options)

    def export(
        self,
        payload: Any,
        format_type: str,
        output_path: Union[str, Path],
        **options: Any,
    ) -> str:
        """Render a payload and write it to output_path"""
        text = self.render(payload, format_type, **options)

        # Ensure output directory exists
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)

        with open(output_file, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)

        self.logger.debug(f"Wrote {output_file} ({format_type})")
        return str(output_file)

    def _render_cnf(self, formula: Formula, comments: Sequence[str] = ()) -> str:
        return write_dimacs(formula, comments)

    def _render_document(self, document: Document) -> str:
        return dump_document(document)

    def _render_2ssilp(self, ilp: TwoStageILP) -> str:
        return write_2ssilp(ilp)

    def _render_summary(
        self,
        report: AuditReport,
        title: Optional[str] = None,
        uniqueness: Optional[UniquenessReport] = None,
    ) -> str:
        template = self._templates.from_string(AUDIT_SUMMARY_TEMPLATE)
        return template.render(report=report, title=title, uniqueness=uniqueness)

    def _render_csv(self, frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, lineterminator="\n")
