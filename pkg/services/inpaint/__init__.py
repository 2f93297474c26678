# Inpainting package
