class ConfigError(ValueError):
    """Invalid experiment or model configuration."""
