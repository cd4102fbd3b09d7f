package org.example.cli;

import java.io.ByteArrayInputStream;
import java.io.EOFException;

public final class ByteSource {
    private ByteSource() {
    }

    public static int readShort(ByteArrayInputStream in) throws EOFException {
        int hi = in.read();
        int lo = in.read();
        if ((hi | lo) < 0) {
            throw new EOFException("stream ended");
        }
        return (hi << 8) | lo;
    }
}
