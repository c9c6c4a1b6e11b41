"""Forwarding strategies installed on island nodes."""

from __future__ import annotations

from ..ndn import APP


class DiscoveryStrategy:
    """One-hop broadcast: local requests go out on the broadcast face, requests
    heard on the air go only to the local application."""

    def __init__(self, host):
        self.host = host

    def after_receive_interest(self, fw, in_face, interest, fib_entry):
        if in_face.kind == APP:
            return [self.host.broadcast_face.id]
        if fib_entry is None:
            return []
        return [f for f in fib_entry.next_faces if fw.faces[f].kind == APP]


class ClusterStrategy:
    """Local prefixes first, then the DFB, then up the tree toward the anchor.

    The first Name component is the destination node ID.
    """

    def __init__(self, host, node):
        self.host = host
        self.node = node

    def after_receive_interest(self, fw, in_face, interest, fib_entry):
        if fib_entry is not None and len(fib_entry.prefix):
            local = [f for f in fib_entry.next_faces if fw.faces[f].kind == APP]
            if local:
                return local
        if not len(interest.name):
            return []
        try:
            dest = interest.name.text(0)
        except UnicodeDecodeError:
            return []
        mac = self.node.route(dest)
        if mac is None:
            return []
        return [self.host.face_for_mac(mac).id]
