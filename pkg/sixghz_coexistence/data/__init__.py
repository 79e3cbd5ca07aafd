# Shipped scenario files and sample geodata
