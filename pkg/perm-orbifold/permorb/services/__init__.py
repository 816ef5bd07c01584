# Services package for permorb
