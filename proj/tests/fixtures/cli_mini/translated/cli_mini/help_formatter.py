class HelpFormatter:
    @staticmethod
    def append_separator(buf, it):
        if it.has_next():
            buf.write(", ")

    @staticmethod
    def join_tokens(buf, it):
        while it.has_next():
            buf.write(next(it))
            HelpFormatter.append_separator(buf, it)
