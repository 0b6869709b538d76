# ------ src/exporter/dot.py ------

import logging
import os

import pydot

from src.loader.utils import ensure_directory_exists

logger = logging.getLogger(__name__)


def morse_dot(graph, name='morse'):
    """
    Morse graph as a DOT digraph.

    Args:
        graph (DiGraph): Nodes are Morse indices with a 'label' attribute

    Returns:
        pydot.Dot: One node per Morse set, one edge per connection
    """
    dot = pydot.Dot(name, graph_type='digraph')
    for node, data in sorted(graph.nodes(data=True)):
        dot.add_node(pydot.Node(f"M{node}", label=f'"{data["label"]}"'))
    for source, target in sorted(graph.edges()):
        dot.add_edge(pydot.Edge(f"M{source}", f"M{target}"))
    return dot


def morse_json(graph):
    return {
        'nodes': [{'id': node, 'label': data['label'], 'size': data['size']}
                  for node, data in sorted(graph.nodes(data=True))],
        'edges': [[source, target] for source, target in sorted(graph.edges())],
    }


def save_dot(dot, output_path):
    ensure_directory_exists(os.path.dirname(output_path))
    with open(output_path, 'w', encoding='utf-8') as f:
        f.write(dot.to_string())
    logger.info("DOT graph saved to %s", output_path)


def parse_dot(text):
    """Parse DOT text; returns the first graph or raises ValueError."""
    graphs = pydot.graph_from_dot_data(text)
    if not graphs:
        raise ValueError('not a DOT graph')
    return graphs[0]
