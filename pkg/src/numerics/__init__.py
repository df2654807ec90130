"""Dense complex linear algebra and special functions used by every other area."""
