"""
Parser for the versioned YAML documents (qc, mrd, witness, audit)
"""

from typing import Optional

from ..utils.documents import Document, load_document
from .base_parser import BaseParser


class DocumentParser(BaseParser):
    """Parser for instance, witness and audit documents

    When `expected_kind` is set, documents of any other kind are rejected.
    """

    def __init__(self, settings, expected_kind: Optional[str] = None):
        super().__init__(settings)
        self.supported_extensions = [".yaml", ".yml"]
        self.expected_kind = expected_kind

    def parse_text(self, text: str) -> Document:
        document = load_document(text, self.expected_kind)
        self.logger.debug(f"Loaded {document.kind} document")
        return document
