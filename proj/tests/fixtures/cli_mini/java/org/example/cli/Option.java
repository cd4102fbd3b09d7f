package org.example.cli;

public class Option {
    public static final int UNINITIALIZED = -1;

    private String option;
    private String longOption;
    private boolean required;
    private int argCount;

    public Option(String opt, String longOpt) {
        this.option = opt;
        this.longOption = longOpt;
        this.required = false;
        this.argCount = UNINITIALIZED;
    }

    public String getKey() {
        return option == null ? longOption : option;
    }

    public String getLongOpt() {
        return longOption;
    }

    public boolean isRequired() {
        return required;
    }

    public void setRequired(boolean required) {
        this.required = required;
    }

    public void setArgs(int count) {
        this.argCount = count;
    }

    public boolean hasArg() {
        return argCount > 0;
    }

    @Override
    public int hashCode() {
        int result = option != null ? option.hashCode() : 0;
        return 31 * result + (longOption != null ? longOption.hashCode() : 0);
    }
}
