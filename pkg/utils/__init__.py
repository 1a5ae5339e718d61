from utils.config_loading import read_config, parse_config, format_config_error

__all__ = ["read_config", "parse_config", "format_config_error"]
