package org.example.cli;

public class HelpFormatter {
    static void appendSeparator(StringBuilder buf, TokenIterator it) {
        if (it.hasNext()) {
            buf.append(", ");
        }
    }

    static void joinTokens(StringBuilder buf, TokenIterator it) {
        while (it.hasNext()) {
            buf.append(it.next());
            appendSeparator(buf, it);
        }
    }
}
