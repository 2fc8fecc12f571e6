"""greenkernel library modules."""
