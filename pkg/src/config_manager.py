"""
Configuration management for digitop.
Handles loading and parsing YAML configuration files.
"""

import logging
import os
import yaml
from typing import Dict, Any, Optional
from dataclasses import dataclass

logger = logging.getLogger(__name__)

VALID_FORMATS = ['table', 'json', 'jsonl', 'csv']


@dataclass
class CorpusConfig:
    """Corpus and fixture locations (None means the bundled directories)."""
    directory: Optional[str] = None
    fixtures: Optional[str] = None


@dataclass
class ChecksConfig:
    """Budgets of the exhaustive checks."""
    max_subset_size: int = 8
    max_subsets: int = 200000
    window_radius: int = 3


@dataclass
class ProcessingConfig:
    """Processing configuration settings."""
    workers: int = 1
    verbose: bool = False


@dataclass
class OutputConfig:
    """Output configuration settings."""
    format: str = "table"


@dataclass
class Config:
    """Main configuration class."""
    corpus: CorpusConfig
    checks: ChecksConfig
    processing: ProcessingConfig
    output: OutputConfig


class ConfigManager:
    """Loads an explicitly given YAML file; without one, every value is a default."""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Config:
        """Load configuration from file or use defaults."""
        if not self.config_path or not os.path.exists(self.config_path):
            return self._get_default_config()

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                config_data = yaml.safe_load(f) or {}

            return self._parse_config(config_data)

        except (OSError, yaml.YAMLError, AttributeError, TypeError) as e:
            logger.warning(f"Error loading config file {self.config_path}: {e}. Using default configuration.")
            return self._get_default_config()

    def _parse_config(self, config_data: Dict[str, Any]) -> Config:
        """Parse configuration data into Config object."""
        corpus_data = config_data.get('corpus') or {}
        checks_data = config_data.get('checks') or {}
        processing_data = config_data.get('processing') or {}
        output_data = config_data.get('output') or {}

        return Config(
            corpus=CorpusConfig(
                directory=corpus_data.get('directory'),
                fixtures=corpus_data.get('fixtures')
            ),
            checks=ChecksConfig(
                max_subset_size=checks_data.get('max_subset_size', 8),
                max_subsets=checks_data.get('max_subsets', 200000),
                window_radius=checks_data.get('window_radius', 3)
            ),
            processing=ProcessingConfig(
                workers=processing_data.get('workers', 1),
                verbose=processing_data.get('verbose', False)
            ),
            output=OutputConfig(
                format=output_data.get('format', 'table')
            )
        )

    def _get_default_config(self) -> Config:
        """Get default configuration."""
        return Config(
            corpus=CorpusConfig(),
            checks=ChecksConfig(),
            processing=ProcessingConfig(),
            output=OutputConfig()
        )

    def get_output_format(self) -> str:
        return self.config.output.format

    def merge_with_cli_args(self, **cli_args) -> Dict[str, Any]:
        """Merge config with CLI arguments, giving priority to CLI args."""
        merged = {
            'corpus_dir': cli_args.get('corpus_dir') or self.config.corpus.directory,
            'fixtures_dir': cli_args.get('fixtures_dir') or self.config.corpus.fixtures,
            'workers': cli_args.get('workers') or self.config.processing.workers,
            'format': cli_args.get('format') or self.config.output.format,
            'max_subset_size': cli_args.get('max_subset_size') or self.config.checks.max_subset_size,
            'window_radius': cli_args.get('window_radius') or self.config.checks.window_radius
        }

        # Remove None values
        return {k: v for k, v in merged.items() if v is not None}

    def validate_config(self) -> bool:
        """Validate configuration settings."""
        if self.config.processing.workers < 1:
            logger.warning("Invalid worker count. Must be at least 1.")
            return False

        if self.config.checks.max_subset_size < 1:
            logger.warning("Invalid max_subset_size. Must be at least 1.")
            return False

        if self.config.output.format not in VALID_FORMATS:
            logger.warning(f"Invalid output format. Must be one of: {', '.join(VALID_FORMATS)}")
            return False

        return True
