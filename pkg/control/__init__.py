# Optimal control package
