# Spin systems package
