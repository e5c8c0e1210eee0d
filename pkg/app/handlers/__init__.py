"""Task runners behind the `confab` commands."""
