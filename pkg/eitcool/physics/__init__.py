"""Physics modules: atom model, master equation, cooling limits, ion chain, thermometry"""
