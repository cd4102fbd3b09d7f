package org.example.cli;

import java.util.ArrayList;
import java.util.Collections;
import java.util.LinkedHashMap;
import java.util.List;
import java.util.Map;

public class Options {
    private final Map<String, Option> shortOpts;
    private final Map<String, Option> longOpts;
    private final List<String> requiredOpts;

    public Options() {
        shortOpts = new LinkedHashMap<>();
        longOpts = new LinkedHashMap<>();
        requiredOpts = new ArrayList<>();
    }

    public Options addOption(Option opt) {
        String key = opt.getKey();
        if (opt.getLongOpt() != null) {
            longOpts.put(opt.getLongOpt(), opt);
        }
        if (opt.isRequired()) {
            if (requiredOpts.contains(key)) {
                requiredOpts.remove(key);
            }
            requiredOpts.add(key);
        }
        shortOpts.put(key, opt);
        return this;
    }

    public List<String> getRequiredOptions() {
        return Collections.unmodifiableList(requiredOpts);
    }

    public List<String> getMatchingOptions(String prefix) {
        List<String> matching = new ArrayList<>();
        for (String longOpt : longOpts.keySet()) {
            if (longOpt.startsWith(prefix)) {
                matching.add(longOpt);
            }
        }
        return matching;
    }

    public boolean hasOption(String opt) {
        return shortOpts.containsKey(opt) || longOpts.containsKey(opt);
    }

    public void checkRequired() throws MissingOptionException {
        if (!requiredOpts.isEmpty()) {
            throw new MissingOptionException(requiredOpts);
        }
    }
}
