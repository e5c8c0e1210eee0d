"""Local artifact storage: CSV datasets, model documents and YAML manifests."""
