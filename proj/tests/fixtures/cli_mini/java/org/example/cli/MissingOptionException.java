package org.example.cli;

import java.util.Iterator;
import java.util.List;

public class MissingOptionException extends Exception {
    private List<String> missingOptions;

    public MissingOptionException(List<String> missingOptions) {
        super(createMessage(missingOptions));
        this.missingOptions = missingOptions;
    }

    public List<String> getMissingOptions() {
        return missingOptions;
    }

    private static String createMessage(List<String> missingOptions) {
        StringBuilder buf = new StringBuilder("Missing required option");
        buf.append(missingOptions.size() == 1 ? "" : "s");
        buf.append(": ");
        Iterator<String> it = missingOptions.iterator();
        while (it.hasNext()) {
            buf.append(it.next());
            if (it.hasNext()) {
                buf.append(", ");
            }
        }
        return buf.toString();
    }
}
