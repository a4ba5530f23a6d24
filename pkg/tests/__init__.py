# wwbirkhoff test suite
