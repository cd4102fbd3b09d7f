class ByteSource:
    @staticmethod
    def read_short(stream):
        data = stream.read(2)
        if len(data) < 2:
            raise EOFError("stream ended")
        return (data[0] << 8) | data[1]
