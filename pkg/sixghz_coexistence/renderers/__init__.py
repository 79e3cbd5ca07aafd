# Renderers
