@staticmethod
def append_separator(buf, it):
    if next(it, None) is not None:
        buf.write(", ")
