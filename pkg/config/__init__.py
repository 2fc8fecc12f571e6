"""Configuration package: environment-driven settings for the library and CLI."""

