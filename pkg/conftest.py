# Makes `src` importable when pytest runs from the repository root.
