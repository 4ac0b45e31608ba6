"""基于子图关系图 G^(d) 随机游走的 3/4/5 节点图元浓度估计。"""
