package org.example.cli;

import java.util.Iterator;
import java.util.NoSuchElementException;

public class TokenIterator implements Iterator<String> {
    private final String[] tokens;
    private int index;

    public TokenIterator(String[] tokens) {
        this.tokens = tokens;
        this.index = 0;
    }

    @Override
    public boolean hasNext() {
        return index < tokens.length;
    }

    @Override
    public String next() {
        if (index >= tokens.length) {
            throw new NoSuchElementException("no more tokens");
        }
        return tokens[index++];
    }
}
