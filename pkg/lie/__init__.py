# Lie algebra package
