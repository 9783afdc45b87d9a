"""Self-repairing web wrappers built on tree-gram snapshots."""
