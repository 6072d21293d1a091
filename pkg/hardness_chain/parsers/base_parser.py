"""
Base parser class for input files
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, List, Union

from ..core.errors import UnreadableInput


class BaseParser(ABC):
    """Base class for all input file parsers"""

    def __init__(self, settings):
        self.settings = settings
        self.logger = logging.getLogger(self.__class__.__name__)
        self.supported_extensions: List[str] = []
        self.parser_name = self.__class__.__name__

    @abstractmethod
    def parse_text(self, text: str) -> Any:
        """Parse the full contents of an input file"""
        pass

    def can_parse(self, file_path: Union[str, Path]) -> bool:
        """Check if this parser can handle the given file"""
        file_ext = Path(file_path).suffix.lower()
        return file_ext in self.supported_extensions

    def validate_file(self, file_path: Union[str, Path]) -> bool:
        """Validate that the file exists and is readable"""
        try:
            path = Path(file_path)
            if not path.exists():
                self.logger.error(f"File does not exist: {file_path}")
                return False

            if not path.is_file():
                self.logger.error(f"Path is not a file: {file_path}")
                return False

            # Check file size
            max_size = self.settings.parsers.max_file_size_mb * 1024 * 1024
            if path.stat().st_size > max_size:
                self.logger.warning(
                    f"File size ({path.stat().st_size} bytes) exceeds maximum "
                    f"({max_size} bytes): {file_path}"
                )
                return False

            return True

        except OSError as e:
            self.logger.error(f"Error validating file {file_path}: {e}")
            return False

    def parse_file(self, file_path: Union[str, Path]) -> Any:
        """Validate, read and parse a file

        Raises:
            UnreadableInput: the file is missing, too large or not decodable.
        """
        if not self.validate_file(file_path):
            raise UnreadableInput(f"cannot read {file_path}")
        try:
            text = Path(file_path).read_text(encoding=self.settings.parsers.encoding)
        except (OSError, UnicodeDecodeError) as e:
            raise UnreadableInput(f"cannot read {file_path}: {e}") from e
        self.logger.debug(f"{self.parser_name} parsing {file_path}")
        return self.parse_text(text)
