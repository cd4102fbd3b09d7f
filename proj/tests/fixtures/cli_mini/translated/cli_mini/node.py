class Node:
    def __init__(self, label):
        self.__label = label
        self.__next = None

    def link(self, other):
        self.__next = other

    def get_label(self):
        return self.__label
