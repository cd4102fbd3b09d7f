package org.example.cli;

public class Node {
    private final String label;
    private Node next;

    public Node(String label) {
        this.label = label;
    }

    public void link(Node other) {
        this.next = other;
    }

    public String getLabel() {
        return label;
    }
}
